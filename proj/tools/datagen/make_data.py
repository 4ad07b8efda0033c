#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the bundled sample data: case suites, benchmark files, sample data
packages, job inputs, repository fixtures and the scripted model rules.

Output is deterministic; rerun after editing and commit the results.
"""
import csv
import io
import json
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
CONFIG = ROOT / "config"

# ---------------------------------------------------------------- case suites

CASES = {
    "researcher": [
        "Find recent articles on TiO2-supported Pt catalysts for CO oxidation",
        "Search the literature for NiFe layered double hydroxide catalysts for oxygen evolution",
        "Look up publications on the water-gas shift reaction over Cu/ZnO/Al2O3",
        "What does the literature say about Ostwald ripening of Pd nanoparticles on CeO2?",
        "Find papers on single-atom Pt1/FeOx catalysts",
        "Review published work on coke formation during dry reforming over Ni/MgAl2O4",
        "List recent articles on MoS2 edge sites for the hydrogen evolution reaction",
        "Search publications about Co3O4 spinel catalysts for methane combustion",
        "Find literature on in situ TEM studies of Au nanoparticle coalescence",
        "Look for papers describing IrO2 stability in acidic water electrolysis",
        "Find articles on the water-gas shift reaction over Pt/CeO2",
        "Survey the literature on Fe-N-C catalysts for oxygen reduction",
        "Find publications on zeolite H-ZSM-5 deactivation in methanol-to-olefins",
        "Search for articles on CeO2-ZrO2 oxygen storage capacity after aging",
        "What papers discuss strong metal-support interaction in Rh/TiO2?",
        "Find literature on Cu-SSZ-13 for selective catalytic reduction of NOx",
        "Review articles about RuO2 catalysts for HCl oxidation",
        "Look up publications on Pt3Ni nanoframes for fuel cell cathodes",
        "Find papers about sintering resistance of Pt on La-doped Al2O3",
        "Search the literature on BaTiO3 piezocatalysis for dye degradation",
    ],
    "analyzer": [
        "Analyze the particle size measurements from the Pt sintering experiment",
        "Run an analysis of the water-gas shift conversion data and plot conversion against temperature",
        "Give me summary statistics for the time-on-stream degradation dataset",
        "Analyze how conversion loss depends on metal loading in the degradation dataset",
        "Plot and analyze the Pt particle diameter growth over time",
        "Perform an exploratory analysis of the catalyst degradation dataset",
        "Analyse the spread of particle diameters in the sintering dataset",
        "Compute statistics of CO conversion for each catalyst in the water-gas shift dataset",
        "Analyze the relationship between temperature and conversion in the water-gas shift measurements",
        "Which dataset columns correlate with conversion loss? Run the analysis",
        "Analyze the standard deviation of particle size across the sintering time series",
        "Make a statistical summary of the time-on-stream data grouped by synthesis method",
        "Analyze the sintering dataset and tell me how fast the mean diameter grows",
        "Visualize and analyze the Cu/ZnO versus Pt/CeO2 activity in the water-gas shift dataset",
        "Run a data analysis on the degradation measurements at different temperatures",
        "Analyze outliers in the particle size dataset",
        "Give me descriptive statistics of the water-gas shift dataset",
        "Analyze the trend of conversion loss with time on stream",
        "Analyze my Pt/Al2O3 sintering measurements and plot the growth curve",
        "Summarize the degradation dataset with an analysis of each synthesis method",
    ],
    "hypothesizer": [
        "Generate a hypothesis about why Pt particles grow faster on alumina than on ceria",
        "Propose a research plan to test whether steam accelerates Ni sintering",
        "Formulate a hypothesis for the loss of activity of Cu/ZnO after 100 hours on stream",
        "Draft a research plan on anchoring Pt single atoms with CeO2 defects",
        "Give me a hypothesis linking metal loading to catalyst deactivation rate",
        "Create a research plan to study coke formation on Ni/MgAl2O4 under dry reforming",
        "Suggest a hypothesis explaining particle migration and coalescence at 700 C",
        "Write a hypothesis on how La doping stabilizes alumina supports",
        "Build a research plan for improving IrO2 stability in acid electrolysis",
        "Hypothesize why incipient wetness catalysts degrade faster than colloidal ones",
        "Develop a hypothesis about chlorine effects on Pt redispersion",
        "Propose a hypothesis relating support oxygen vacancies to CO oxidation activity",
        "Outline a research plan on hydrothermal aging of Cu-SSZ-13",
        "Generate a hypothesis for the induction period in methanol-to-olefins over H-ZSM-5",
        "Give me a research plan to separate Ostwald ripening from coalescence in Pd/CeO2",
        "Form a hypothesis about the role of Fe in NiFe hydroxide oxygen evolution",
        "Create a hypothesis for the temperature dependence of Pt particle growth",
        "Draft a hypothesis on strong metal-support interaction in Rh/TiO2 after reduction",
        "Propose a research plan to reduce sulfur poisoning of Pd methane oxidation catalysts",
        "Suggest a hypothesis on why smaller Au particles are more active for CO oxidation",
    ],
    "simulation": [
        "Simulate Pt nanoparticle sintering at 650 C",
        "Run a sintering simulation at 700 degrees Celsius",
        "Predict the nanoparticle size evolution at 500 C",
        "Simulate particle coarsening at 800 C for my Pt catalyst",
        "What size will the particles reach after sintering at 600 C? Please simulate it",
        "Run the sintering model at 550 C",
        "Simulate Pt particle growth at 750 degrees C",
        "Show me the size evolution of Pt nanoparticles at 450 C",
        "Simulate sintering at 900 C and give me the confidence band",
        "Start a sintering simulation for 680 C",
        "Simulate catalyst sintering at 720 C",
        "Predict particle coarsening at 520 C using the simulation",
        "Simulate how Pt particles sinter at 610 C",
        "Run a simulation of particle size evolution at 580 C",
        "I need a sintering simulation at 660 C",
        "Simulate sintering at 1000 C",
        "Launch a sintering simulation at 630 C",
        "Simulate nanoparticle coarsening at 770 C",
        "Simulate the size evolution at 690 C with the stand-in model",
        "Please simulate sintering of my catalyst at 540 C",
    ],
    "segmenter": [
        "Segment the particles in disk_ellipse.json",
        "Track the particles through growth_video.json",
        "Segment the nanoparticles in my TEM image",
        "Track particle growth in the in situ video",
        "Segment particles and report eccentricity and solidity",
        "Track nanoparticles across all frames of the video",
        "Run particle segmentation on the micrograph",
        "Track the particles in the microscopy video and give me the annotated output",
        "Segment the image and measure particle areas",
        "Track the particle sizes through the video frames",
        "Segment the particles in the latest TEM image",
        "Track particles in growth_video.json and report their centroids",
        "Segment particles in the micrograph and compute sphericity",
        "Track the nanoparticles and produce an annotated video",
        "Segment the TEM image of my catalyst",
        "Track how each particle moves through the video",
        "Segment all particles in the sample image",
        "Track particle coalescence in the video",
        "Segment the particles and list their shape descriptors",
        "Track the particles frame by frame in my video",
    ],
    "uq": [
        "Suggest the next experiments using uncertainty quantification",
        "Which conditions have the highest predictive uncertainty?",
        "Rank candidate conditions by uncertainty between 300 and 600 C",
        "Use a Gaussian process to find where the model is most uncertain",
        "Recommend next experiments for metal loadings between 1 and 4 wt%",
        "Where should I measure next to reduce uncertainty in conversion loss?",
        "Run active learning to pick the next experiment",
        "Quantify uncertainty over the temperature and loading grid",
        "Give me an uncertainty map for incipient wetness catalysts",
        "Suggest the next experiment with the largest uncertainty",
        "Plan the next experiments with uncertainty quantification for 400 to 700 C",
        "Find the most uncertain synthesis conditions",
        "Use uncertainty quantification to choose the next catalyst to make",
        "Rank experimental conditions by Gaussian process variance",
        "Propose the next experiments using active learning on the degradation data",
        "Show the uncertainty of predicted conversion loss across conditions",
        "Which metal loading should we test next according to uncertainty?",
        "Compute uncertainty-ranked suggestions for colloidal catalysts",
        "Suggest next experiments with the highest uncertainty between 0.5 and 3 wt% loading",
        "Give me the top uncertainty candidates for the next experiment",
    ],
}

AMBIGUOUS = [
    ("segmenter", "Give me statistical analysis of particle sizes and their changes over time from my tracking results."),
    ("segmenter", "Submit a job to track the particles in growth_video.json"),
    ("uq", "Start a job that ranks candidate conditions by uncertainty between 300 and 600 C"),
    ("simulation", "Analyze how Pt particles would grow at 700 C over ten hours"),
    ("simulation", "What happens to my platinum particles if I hold them at 800 C for a day?"),
    ("uq", "Which catalyst recipe should we try next to learn the most?"),
]

BLOCKED = ["eval", "exec", "open(", "input(", "subprocess"]


def check_prompt(p):
    for b in BLOCKED:
        assert b not in p, (b, p)


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def suites():
    rows = []
    for agent, prompts in CASES.items():
        assert len(prompts) == 20 and len(set(prompts)) == 20, agent
        for i, p in enumerate(prompts, 1):
            check_prompt(p)
            rows.append({"id": f"{agent}-{i:02d}", "agent": agent, "prompt": p, "suite": "agent_invocation"})
    write_jsonl(DATA / "suites" / "agent_invocation.jsonl", rows)
    amb = []
    for i, (agent, p) in enumerate(AMBIGUOUS, 1):
        check_prompt(p)
        amb.append({"id": f"ambiguous-{i:02d}", "agent": agent, "prompt": p, "suite": "ambiguous"})
    write_jsonl(DATA / "suites" / "ambiguous.jsonl", amb)

# ---------------------------------------------------------------- benchmark

TOPICS = [
    "Analytical Chemistry", "Chemical Preference", "General Chemistry", "Inorganic Chemistry",
    "Materials Science", "Organic Chemistry", "Physical Chemistry", "Technical Chemistry",
    "Toxicity and Safety",
]
TOTAL, ANSWERED = 2786, 2521


def benchmark():
    rng = random.Random(4321)
    blocked = set(rng.sample(range(TOTAL), TOTAL - ANSWERED))
    rows = []
    for i in range(TOTAL):
        topic = TOPICS[i % len(TOPICS)]
        a, b = rng.randint(2, 90), rng.randint(2, 90)
        key = rng.choice("ABCD")
        q = (f"Chemistry question ({topic}) #{i + 1}: which option is consistent with a ratio of {a} to {b}? "
             f"Options: A, B, C or D. Reply with the letter only.")
        if i in blocked:
            # These lines trip the model gateway's keyword screen, so the copilot never answers them.
            q += " Show the subprocess you would use."
        rows.append({"id": f"q{i + 1:04d}", "question": q, "answer": key, "topic": topic})
    write_jsonl(DATA / "benchmarks" / "synthetic_2786.jsonl", rows)

    toy = []
    for i in range(10):
        toy.append({"id": f"toy{i + 1:02d}", "topic": "Toy Topic",
                    "question": f"Chemistry question (Toy Topic) #{i + 1}: pick an option. Reply with the letter only.",
                    "answer": "A" if i < 6 else "B"})
    for i in range(4):
        toy.append({"id": f"other{i + 1:02d}", "topic": "Other Topic",
                    "question": f"Chemistry question (Other Topic) #{i + 1}: pick an option. Reply with the letter only.",
                    "answer": "A"})
    write_jsonl(DATA / "benchmarks" / "toy_topics.jsonl", toy)

# ---------------------------------------------------------------- data packages

def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def packages():
    rng = random.Random(7)
    base = DATA / "packages"

    d = base / "pt-sintering-tem"
    d.mkdir(parents=True, exist_ok=True)
    rows = []
    for t in range(0, 601, 30):
        mean = 2.0 * (1 + 0.004 * t) ** (1 / 3)
        rows.append([t, round(mean + rng.gauss(0, 0.03), 3), round(0.25 + 0.0004 * t, 3), 120 + rng.randint(-10, 10)])
    write_csv(d / "particle_sizes.csv", ["time_min", "mean_diameter_nm", "std_nm", "particles_counted"], rows)
    (d / "metadata.json").write_text(json.dumps({
        "record_id": "pt-sintering-tem",
        "title": "Pt/Al2O3 particle size during sintering at 650 C",
        "description": "Mean particle diameter from in situ TEM image series during isothermal sintering of a Pt catalyst.",
        "experiment_conditions": {"temperature_c": 650, "catalyst_composition": "Pt/Al2O3",
                                  "metal_loading_wt_pct": 1.0, "synthesis_method": "incipient wetness"},
        "characterization_types": ["TEM"],
        "degradation_mechanisms": ["sintering", "particle growth"],
        "provenance": {"uploader": "lab-a", "timestamp": "2025-03-14T10:00:00Z"},
    }, indent=2) + "\n")

    d = base / "wgs-activity"
    d.mkdir(parents=True, exist_ok=True)
    rows = []
    for cat, t50 in (("Cu/ZnO/Al2O3", 230), ("Pt/CeO2", 280)):
        for temp in range(150, 401, 25):
            conv = 100 / (1 + math.exp(-(temp - t50) / 25))
            rows.append([cat, temp, round(conv + rng.gauss(0, 0.8), 2)])
    write_csv(d / "conversion.csv", ["catalyst", "temperature_c", "co_conversion_pct"], rows)
    (d / "metadata.json").write_text(json.dumps({
        "record_id": "wgs-activity",
        "title": "Water-gas shift conversion versus temperature",
        "description": "CO conversion light-off curves for Cu/ZnO/Al2O3 and Pt/CeO2 water-gas shift catalysts.",
        "experiment_conditions": {"catalyst_composition": "Cu/ZnO/Al2O3; Pt/CeO2", "synthesis_method": "coprecipitation"},
        "characterization_types": ["activity test", "gas chromatography"],
        "degradation_mechanisms": [],
        "provenance": {"uploader": "lab-b", "timestamp": "2025-04-02T09:30:00Z"},
    }, indent=2) + "\n")

    d = base / "tos-degradation"
    d.mkdir(parents=True, exist_ok=True)
    rows = []
    for method in ("incipient wetness", "colloidal", "strong electrostatic adsorption"):
        for loading in (0.5, 1.0, 2.0, 4.0):
            for temp in (400, 500, 600):
                loss = 0.02 * (temp - 350) * (1 + 0.15 * loading) * (1.2 if method == "incipient wetness" else 1.0)
                rows.append([method, loading, temp, 100, round(loss + rng.gauss(0, 0.3), 2)])
    write_csv(d / "time_on_stream.csv",
              ["synthesis_method", "metal_loading_wt_pct", "temperature_c", "hours_on_stream", "conversion_loss_pct"], rows)
    (d / "metadata.json").write_text(json.dumps({
        "record_id": "tos-degradation",
        "title": "Time-on-stream degradation of supported Pt catalysts",
        "description": "Conversion loss after 100 hours on stream for several synthesis methods, metal loadings and temperatures.",
        "experiment_conditions": {"catalyst_composition": "Pt/Al2O3"},
        "characterization_types": ["activity test"],
        "degradation_mechanisms": ["sintering", "deactivation"],
        "provenance": {"uploader": "lab-a", "timestamp": "2025-05-20T15:45:00Z"},
    }, indent=2) + "\n")

# ---------------------------------------------------------------- job inputs

def job_inputs():
    seg = DATA / "inputs" / "segmentation"
    seg.mkdir(parents=True, exist_ok=True)
    (seg / "disk_ellipse.json").write_text(json.dumps({
        "width": 256, "height": 256, "nm_per_px": 0.5,
        "particles": [
            {"shape": "circle", "cx": 70, "cy": 80, "r": 30, "vertices": 4096},
            {"shape": "ellipse", "cx": 170, "cy": 150, "a": 40, "b": 20, "angle_deg": 30, "vertices": 4096},
            {"shape": "polygon", "points": [[40, 180], [100, 180], [100, 230], [40, 230]]},
        ],
    }, indent=2) + "\n")
    frames = []
    for f in range(8):
        frames.append({"particles": [
            {"shape": "circle", "cx": 60 + 2 * f, "cy": 70, "r": 12 + 1.5 * f, "vertices": 1024},
            {"shape": "ellipse", "cx": 180, "cy": 170 - f, "a": 18 + f, "b": 12 + 0.5 * f, "vertices": 1024},
        ]})
    (seg / "growth_video.json").write_text(json.dumps({"width": 256, "height": 256, "nm_per_px": 0.5,
                                                       "frames": frames}, indent=2) + "\n")
    uq = DATA / "inputs" / "uq"
    uq.mkdir(parents=True, exist_ok=True)
    rng = random.Random(11)
    rows = []
    for method in ("colloidal", "incipient wetness"):
        for temp in (350, 450, 550, 650):
            for loading in (1.0, 3.0):
                loss = 0.015 * (temp - 300) * (1 + 0.1 * loading) * (1.3 if method == "incipient wetness" else 1.0)
                rows.append([temp, loading, method, round(loss + rng.gauss(0, 0.2), 3)])
    write_csv(uq / "training.csv", ["temperature_c", "metal_loading_wt_pct", "synthesis_method", "conversion_loss_pct"], rows)

# ---------------------------------------------------------------- repository fixtures

def fixture_records(topic, n, seed):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        out.append({
            "title": f"{topic}: synthetic fixture record {i + 1}",
            "description": f"Offline stand-in record {i + 1} about {topic.lower()} used for repeatable tests.",
            "authors": [f"Author {chr(65 + rng.randint(0, 25))}.", f"Author {chr(65 + rng.randint(0, 25))}."],
            "doi": f"10.5555/fixture.{seed}.{i + 1}",
            "publication_date": f"202{rng.randint(0, 4)}-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}",
            "osti_id": str(9000000 + seed * 100 + i),
        })
    return out


def fixtures():
    d = DATA / "osti_fixtures"
    d.mkdir(parents=True, exist_ok=True)
    entries = [
        ("water-gas shift", "water_gas_shift.json", "Water-gas shift reaction catalysts", 6, 1),
        ("TiO2 Pt CO oxidation", "tio2_pt_co_oxidation.json", "Pt/TiO2 catalysts for CO oxidation", 4, 2),
        ("NiFe layered double hydroxide", "nife_ldh.json", "NiFe layered double hydroxide electrocatalysts", 5, 3),
        ("sintering", "sintering.json", "Nanoparticle sintering in supported catalysts", 3, 4),
    ]
    index = []
    for key, name, topic, n, seed in entries:
        (d / name).write_text(json.dumps(fixture_records(topic, n, seed), indent=2) + "\n")
        index.append({"key": key, "file": name})
    # A deliberately broken body for parser tests: the second record's title is a number.
    broken = fixture_records("Malformed fixture", 2, 9)
    broken[1]["title"] = 42
    (d / "malformed.json").write_text(json.dumps(broken, indent=2) + "\n")
    index.append({"key": "malformed fixture probe", "file": "malformed.json"})
    (d / "index.json").write_text(json.dumps({"fixtures": index}, indent=2) + "\n")

# ---------------------------------------------------------------- scripted rules

def rule(name, text=None, tool_calls=None, **when):
    r = {"name": name, "when": when, "respond": {}}
    if text is not None:
        r["respond"]["text"] = text
    if tool_calls:
        r["respond"]["tool_calls"] = tool_calls
    return r


def route(agent):
    return json.dumps({"route": agent})


ANSWER_WITH_REPORT = "{{last_agent_output}}\n\nSub-agents used: {{agents_used}}\nTools used: {{tools_used}}"

CANNED_PLAN = (
    "Objectives:\n"
    "- Identify which controllable variables in the request change the observed behaviour\n"
    "- Quantify each effect with a small factorial set of experiments\n"
    "Theoretical framing:\n"
    "Particle growth on supports follows thermally activated transport, so rates should scale with an Arrhenius "
    "factor and with the driving force set by the particle size distribution.\n"
    "Hypothesis:\n"
    "For the topic \"{{task_head}}\", raising temperature or metal loading increases the growth rate, and supports "
    "that bind the metal more strongly slow it down."
)


def job_rules(agent, submit):
    return [
        rule(f"{agent}-collect", tool_calls=[{"name": "collect_job_outputs", "args": {"job_id": "{{job_id}}"}}],
             agent=agent, last="user", all=["job-"], any=["result", "output", "collect"]),
        rule(f"{agent}-status", tool_calls=[{"name": "job_status", "args": {"job_id": "{{job_id}}"}}],
             agent=agent, last="user", any=["job-"]),
        rule(f"{agent}-list", tool_calls=[{"name": "list_jobs", "args": {}}],
             agent=agent, last="user", any=["list my jobs", "my jobs", "status of my"]),
        *submit,
        rule(f"{agent}-report", text="{{last_tool_output}}", agent=agent, last="tool"),
    ]


def scripted_rules():
    rules = [
        # Supervisor
        # Free text from the supervisor is taken as its final answer.
        rule("supervisor-return", text=ANSWER_WITH_REPORT, agent="supervisor", last="agent"),
        rule("supervisor-benchmark", text=json.dumps({"respond": "Answer: A"}), agent="supervisor", last="user",
             any=["chemistry question"]),
        rule("supervisor-analysis", text=route("analyzer"), agent="supervisor", last="user",
             any=["analysis", "analyze", "analyse", "dataset", "statistic"]),
        rule("supervisor-literature", text=route("researcher"), agent="supervisor", last="user",
             any=["literature", " article", "paper", "publication", "osti", "review"]),
        rule("supervisor-hypothesis", text=route("hypothesizer"), agent="supervisor", last="user",
             any=["hypothes", "research plan"]),
        # Every batch-backed agent submits jobs; the word alone is read as a simulation request.
        rule("supervisor-job", text=route("simulation"), agent="supervisor", last="user", any=["job"]),
        rule("supervisor-segmentation", text=route("segmenter"), agent="supervisor", last="user",
             any=["segment", "track", "video", "micrograph", "tem image"]),
        rule("supervisor-uq", text=route("uq"), agent="supervisor", last="user",
             any=["uncertain", "next experiment", "gaussian process", "active learning"]),
        rule("supervisor-simulation", text=route("simulation"), agent="supervisor", last="user",
             any=["simulat", "sinter", "size evolution", "coarsening"]),
        rule("supervisor-clarify", text=json.dumps({"clarify": "Which kind of help do you need: literature search, "
                                                    "data analysis, a hypothesis, a sintering simulation, particle "
                                                    "segmentation or experiment planning?"}),
             agent="supervisor"),

        # Researcher
        rule("researcher-search", tool_calls=[{"name": "osti_search", "args": {"query": "{{task_head}}", "rows": "5"}}],
             agent="researcher", last="user"),
        rule("researcher-summary", text="Publications found in the repository:\n\n{{last_tool_output}}",
             agent="researcher", last="tool"),

        # Analyzer
        rule("analyzer-run", tool_calls=[{"name": "analyze_dataset", "args": {"query": "{{task_head}}"}}],
             agent="analyzer", last="user"),
        rule("analyzer-report", text="{{last_tool_output}}", agent="analyzer", last="tool"),
        rule("analysis-codegen", agent="analysis_codegen", text=(
            "The table is summarized column by column and every numeric column is plotted against the first one, "
            "which shows the main trend. Check the spread of repeated measurements next.\n\n"
            "```python\n"
            "import pandas as pd\n"
            "import matplotlib.pyplot as plt\n"
            "\n"
            "df = pd.read_csv(INPUT_FILES[0])\n"
            "print(df.describe().to_string())\n"
            "num = df.select_dtypes('number')\n"
            "x = num.columns[0]\n"
            "fig, ax = plt.subplots(figsize=(6, 4))\n"
            "for col in num.columns[1:]:\n"
            "    ax.plot(num[x], num[col], marker='o', linestyle='', label=col)\n"
            "ax.set_xlabel(x)\n"
            "ax.legend()\n"
            "fig.tight_layout()\n"
            "fig.savefig('overview.png', dpi=80)\n"
            "```\n")),

        # Hypothesizer
        rule("hypothesizer-run", tool_calls=[{"name": "hypothesis_generator", "args": {"topic": "{{task_head}}"}}],
             agent="hypothesizer", last="user"),
        rule("hypothesizer-report", text="{{last_tool_output}}", agent="hypothesizer", last="tool"),
        rule("hypothesis-tool", text=CANNED_PLAN, agent="hypothesis_tool"),
        rule("hypothesis-fallback", text=(
            "Objectives:\n- Restate the parameters given in the request as testable variables\n"
            "Theoretical framing:\nA first-order response model around the stated conditions.\n"
            "Hypothesis:\nThe stated parameters shift the response in a measurable, monotone way."),
             agent="hypothesis_fallback"),
    ]
    rules += job_rules("simulation", [
        rule("simulation-submit",
             tool_calls=[{"name": "run_sintering_simulation", "args": {"temperature": "{{first_number}}"}}],
             agent="simulation", last="user"),
    ])
    rules += job_rules("segmenter", [
        rule("segmenter-inputs", tool_calls=[{"name": "list_segmentation_inputs", "args": {}}],
             agent="segmenter", last="user", any=["which inputs", "available inputs", "list inputs"]),
        rule("segmenter-video", tool_calls=[{"name": "track_particles_video", "args": {"input": "growth_video.json"}}],
             agent="segmenter", last="user", any=["video", "track", "frame"]),
        rule("segmenter-image", tool_calls=[{"name": "segment_particles_image", "args": {"input": "disk_ellipse.json"}}],
             agent="segmenter", last="user"),
    ])
    rules += job_rules("uq", [
        rule("uq-submit", tool_calls=[{"name": "suggest_experiments_uq", "args": {}}], agent="uq", last="user"),
    ])

    # Case generation: one canned listing per agent, keyed on words from that agent's prompt.
    for agent, key in (("researcher", "literature"), ("analyzer", "datasets"), ("hypothesizer", "research plans"),
                       ("simulation", "sintering simulations"), ("segmenter", "segment and track"),
                       ("uq", "under uncertainty")):
        rules.append(rule(f"cases-{agent}", text="\n".join(CASES[agent]), agent="case_generator", any=[key]))

    rules.append(rule("fallback", text="No scripted reply matches this request."))
    body = json.dumps({"rules": rules}, indent=2, ensure_ascii=False) + "\n"
    CONFIG.mkdir(parents=True, exist_ok=True)
    (CONFIG / "scripted_rules.json").write_text(body)
    json.loads(body)


if __name__ == "__main__":
    suites()
    benchmark()
    packages()
    job_inputs()
    fixtures()
    scripted_rules()

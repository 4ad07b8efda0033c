// SPDX-License-Identifier: Apache-2.0
// Interpreter-side half of the sandbox. Installed as <root>/runner.py.

namespace copilot::sandbox::detail {

extern const char* const kRunnerSource;

const char* const kRunnerSource = R"PY(
import errno
import importlib
import json
import linecache
import os
import sys
import sysconfig
import traceback
import types

ISOLATION, MEMORY, OUTPUT = 86, 87, 88

run_dir, scratch = sys.argv[1], os.path.realpath(sys.argv[2])
with open(os.path.join(run_dir, "script.py"), encoding="utf-8") as fh:
    source = fh.read()
with open(os.path.join(run_dir, "setup.json"), encoding="utf-8") as fh:
    setup = json.load(fh)

read_roots = {scratch, "/dev/null", "/dev/urandom", "/proc/self", "/etc/fonts", "/etc/matplotlibrc"}
for p in [sys.prefix, sys.base_prefix, sys.exec_prefix, *sys.path, *sysconfig.get_paths().values(),
          "/usr/share", "/usr/lib", "/usr/local/lib", "/usr/local/share"]:
    if p:
        read_roots.add(os.path.realpath(p))
read_roots.add(os.path.realpath(__file__))
write_roots = {scratch, "/dev/null"}

WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_CREAT | os.O_APPEND | os.O_TRUNC
PATH_WRITE_EVENTS = {"os.remove": (0,), "os.rmdir": (0,), "os.mkdir": (0,), "os.chmod": (0,),
                     "os.chown": (0,), "os.truncate": (0,), "os.utime": (0,), "os.rename": (0, 1),
                     "os.link": (0, 1), "os.symlink": (1,), "shutil.rmtree": (0,)}
PATH_READ_EVENTS = {"os.listdir": (0,), "os.scandir": (0,), "glob.glob": (0,)}
BLOCKED_PREFIXES = ("socket.", "subprocess.", "os.exec", "os.spawn", "os.posix_spawn", "os.fork",
                    "os.forkpty", "os.kill", "os.killpg", "os.system", "pty.", "os.startfile")

_busy = False


def _violation(what):
    try:
        os.write(2, ("__SANDBOX_ISOLATION__ " + what + "\n").encode("utf-8", "replace"))
    except OSError:
        pass
    os._exit(ISOLATION)


def _within(path, roots):
    for r in roots:
        if path == r or path.startswith(r.rstrip("/") + "/"):
            return True
    return False


def _resolve(path):
    if isinstance(path, int) or path is None:
        return None
    p = os.fsdecode(path)
    if not p:
        p = "."
    return os.path.realpath(p)


def _hook(event, args):
    global _busy
    if _busy:
        return
    if event.startswith(BLOCKED_PREFIXES):
        _violation(event)
    if event != "open" and event not in PATH_WRITE_EVENTS and event not in PATH_READ_EVENTS:
        return
    _busy = True
    try:
        if event == "open":
            path, mode, flags = (list(args) + [None, None, None])[:3]
            p = _resolve(path)
            if p is None:
                return
            if isinstance(flags, int) and flags >= 0:
                writing = bool(flags & WRITE_FLAGS)
            else:
                writing = isinstance(mode, str) and any(c in mode for c in "wax+")
            if not _within(p, write_roots if writing else read_roots):
                _violation("open " + p)
        elif event in PATH_WRITE_EVENTS:
            for i in PATH_WRITE_EVENTS[event]:
                p = _resolve(args[i]) if i < len(args) else None
                if p is not None and not _within(p, write_roots):
                    _violation(event + " " + p)
        else:
            for i in PATH_READ_EVENTS[event]:
                p = _resolve(args[i]) if i < len(args) else None
                if p is not None and not _within(p, read_roots):
                    _violation(event + " " + p)
    finally:
        _busy = False


class _LazyModule(types.ModuleType):
    def __init__(self, name, target, extra):
        super().__init__(name)
        self.__dict__["_lazy_target"] = target
        self.__dict__["_lazy_extra"] = extra

    def _lazy_load(self):
        for m in self.__dict__["_lazy_extra"]:
            importlib.import_module(m)
        return importlib.import_module(self.__dict__["_lazy_target"])

    def __getattr__(self, attr):
        return getattr(self._lazy_load(), attr)

    def __dir__(self):
        return dir(self._lazy_load())


DEFAULT_ALIASES = {
    "numpy": [("np", "numpy"), ("numpy", "numpy")],
    "pandas": [("pd", "pandas"), ("pandas", "pandas")],
    "matplotlib": [("plt", "matplotlib.pyplot"), ("matplotlib", "matplotlib"), ("mpl", "matplotlib")],
    "seaborn": [("sns", "seaborn"), ("seaborn", "seaborn")],
}


def _bind(g, b):
    mod = importlib.import_module(b["module"])
    attr = b.get("attribute", "")
    if attr == "*":
        names = getattr(mod, "__all__", None) or [k for k in vars(mod) if not k.startswith("_")]
        for k in names:
            g[k] = getattr(mod, k)
    elif attr:
        try:
            g[b["name"]] = getattr(mod, attr)
        except AttributeError:
            g[b["name"]] = importlib.import_module(b["module"] + "." + attr)
    elif b.get("bind_root"):
        g[b["name"]] = sys.modules[b["module"].split(".")[0]]
    else:
        g[b["name"]] = mod


def _flush():
    for stream in (sys.stdout, sys.stderr):
        try:
            stream.flush()
        except OSError as e:
            if e.errno == errno.EFBIG:
                os._exit(OUTPUT)


def main():
    os.chdir(scratch)
    sys.path = [p for p in sys.path if p]
    sys.addaudithook(_hook)
    g = {"__name__": "__main__", "__builtins__": __builtins__, "INPUT_FILES": list(setup.get("inputs", []))}
    for lib in setup.get("preloaded", []):
        for name, target in DEFAULT_ALIASES.get(lib, [(lib, lib)]):
            extra = ["matplotlib.pyplot"] if target == "matplotlib" else []
            g[name] = _LazyModule(target, target, extra)
    try:
        for b in setup.get("bindings", []):
            _bind(g, b)
        linecache.cache["<analysis>"] = (len(source), None, source.splitlines(True), "<analysis>")
        exec(compile(source, "<analysis>", "exec"), g)
    except MemoryError:
        sys.stderr.write("MemoryError: memory limit exceeded\n")
        _flush()
        os._exit(MEMORY)
    except SystemExit as e:
        _flush()
        code = e.code
        os._exit(0 if code is None else (code if isinstance(code, int) else 1))
    except BaseException as e:
        if isinstance(e, OSError) and e.errno == errno.EFBIG:
            os._exit(OUTPUT)
        try:
            # skip the runner's own frame
            traceback.print_exception(type(e), e, e.__traceback__.tb_next, file=sys.stdout)
        except OSError:
            pass
        _flush()
        os._exit(1)
    _flush()
    os._exit(0)


main()
)PY";

} // namespace copilot::sandbox::detail

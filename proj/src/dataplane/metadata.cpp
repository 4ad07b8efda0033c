// SPDX-License-Identifier: Apache-2.0
#include "copilot/dataplane/metadata.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/tar.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace fs = std::filesystem;

namespace copilot::dataplane {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what)
{
    throw Error(ErrorKind::Validation, "field '" + field + "' " + what);
}

std::optional<double> number_field(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    const auto& v = j.at(key);
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        auto s = std::string(text::trim(v.get<std::string>()));
        if (s.empty())
            return std::nullopt;
        char* end = nullptr;
        double d = std::strtod(s.c_str(), &end);
        if (end && *end == '\0')
            return d;
    }
    invalid(path, "must be a number");
}

std::optional<std::string> string_field(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    const auto& v = j.at(key);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number() || v.is_boolean())
        return v.dump();
    invalid(path, "must be a string");
}

std::optional<std::vector<std::string>> list_field(const Json& j, const std::string& key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    const auto& v = j.at(key);
    if (v.is_string())
        return std::vector<std::string>{v.get<std::string>()};
    if (!v.is_array())
        invalid(key, "must be a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (e.is_string())
            out.push_back(e.get<std::string>());
        else if (e.is_number())
            out.push_back(e.dump());
        else if (!e.is_null())
            invalid(key, "must be a list of strings");
    }
    return out;
}

Json extras_of(const Json& j, std::initializer_list<const char*> known)
{
    Json extras = Json::object();
    for (const auto& [k, v] : j.items())
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; }))
            extras[k] = v;
    return extras;
}

Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<std::vector<std::string>>& v) { return v ? Json(*v) : Json(nullptr); }

void check_payload_name(const std::string& name)
{
    if (name.empty() || name.front() == '/' || name == kMetadataFileName)
        throw Error(ErrorKind::Validation, "invalid payload file name '" + name + "'");
    for (const auto& part : text::split(name, '/'))
        if (part.empty() || part == "." || part == "..")
            throw Error(ErrorKind::Validation, "invalid payload file name '" + name + "'");
}

Json parse_metadata_bytes(const std::string& bytes)
{
    try {
        return Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Validation, std::string("container corrupt: metadata.json is not valid JSON (") +
                                               e.what() + ")");
    }
}

} // namespace

bool MetadataRecord::has_content() const
{
    return title || description || experiment_conditions || characterization_types || degradation_mechanisms ||
           provenance || !extras.empty();
}

std::string MetadataRecord::searchable_text() const
{
    std::vector<std::string> parts{record_id};
    auto add = [&](const std::optional<std::string>& s) {
        if (s)
            parts.push_back(*s);
    };
    add(title);
    add(description);
    if (experiment_conditions) {
        add(experiment_conditions->catalyst_composition);
        add(experiment_conditions->synthesis_method);
    }
    for (const auto* list : {&characterization_types, &degradation_mechanisms})
        if (*list)
            for (const auto& s : **list)
                parts.push_back(s);
    return text::join(parts, "\n");
}

MetadataRecord metadata_from_json(const Json& j)
{
    if (!j.is_object())
        throw Error(ErrorKind::Validation, "metadata document must be a JSON object");
    MetadataRecord m;
    if (!j.contains("record_id") || j.at("record_id").is_null())
        throw Error(ErrorKind::Validation, "missing record id");
    const auto& id = j.at("record_id");
    if (id.is_string())
        m.record_id = std::string(text::trim(id.get<std::string>()));
    else if (id.is_number_integer())
        m.record_id = id.dump();
    else
        invalid("record_id", "must be a string");
    if (m.record_id.empty())
        throw Error(ErrorKind::Validation, "missing record id");

    m.title = string_field(j, "title", "title");
    m.description = string_field(j, "description", "description");
    if (j.contains("experiment_conditions") && !j.at("experiment_conditions").is_null()) {
        const auto& c = j.at("experiment_conditions");
        if (!c.is_object())
            invalid("experiment_conditions", "must be an object");
        ExperimentConditions ec;
        ec.temperature_c = number_field(c, "temperature_c", "experiment_conditions.temperature_c");
        ec.catalyst_composition = string_field(c, "catalyst_composition", "experiment_conditions.catalyst_composition");
        ec.metal_loading_wt_pct = number_field(c, "metal_loading_wt_pct", "experiment_conditions.metal_loading_wt_pct");
        ec.synthesis_method = string_field(c, "synthesis_method", "experiment_conditions.synthesis_method");
        ec.extras = extras_of(c, {"temperature_c", "catalyst_composition", "metal_loading_wt_pct", "synthesis_method"});
        m.experiment_conditions = std::move(ec);
    }
    m.characterization_types = list_field(j, "characterization_types");
    m.degradation_mechanisms = list_field(j, "degradation_mechanisms");
    if (j.contains("provenance") && !j.at("provenance").is_null()) {
        const auto& p = j.at("provenance");
        if (!p.is_object())
            invalid("provenance", "must be an object");
        Provenance pv;
        pv.uploader = string_field(p, "uploader", "provenance.uploader");
        pv.timestamp = string_field(p, "timestamp", "provenance.timestamp");
        pv.extras = extras_of(p, {"uploader", "timestamp"});
        m.provenance = std::move(pv);
    }
    m.extras = extras_of(j, {"record_id", "title", "description", "experiment_conditions", "characterization_types",
                             "degradation_mechanisms", "provenance"});
    return m;
}

Json metadata_to_json(const MetadataRecord& m)
{
    Json j = m.extras.is_object() ? m.extras : Json::object();
    j["record_id"] = m.record_id;
    j["title"] = opt(m.title);
    j["description"] = opt(m.description);
    if (m.experiment_conditions) {
        const auto& c = *m.experiment_conditions;
        Json cj = c.extras.is_object() ? c.extras : Json::object();
        cj["temperature_c"] = opt(c.temperature_c);
        cj["catalyst_composition"] = opt(c.catalyst_composition);
        cj["metal_loading_wt_pct"] = opt(c.metal_loading_wt_pct);
        cj["synthesis_method"] = opt(c.synthesis_method);
        j["experiment_conditions"] = std::move(cj);
    } else {
        j["experiment_conditions"] = nullptr;
    }
    j["characterization_types"] = opt(m.characterization_types);
    j["degradation_mechanisms"] = opt(m.degradation_mechanisms);
    if (m.provenance) {
        Json pj = m.provenance->extras.is_object() ? m.provenance->extras : Json::object();
        pj["uploader"] = opt(m.provenance->uploader);
        pj["timestamp"] = opt(m.provenance->timestamp);
        j["provenance"] = std::move(pj);
    } else {
        j["provenance"] = nullptr;
    }
    return j;
}

DataPackage validate_package(const Json& metadata, std::vector<PayloadFile> files)
{
    DataPackage pkg;
    pkg.metadata = metadata_from_json(metadata);
    std::set<std::string> names;
    for (const auto& f : files) {
        check_payload_name(f.name);
        if (!names.insert(f.name).second)
            throw Error(ErrorKind::Validation, "duplicate payload file '" + f.name + "'");
    }
    if (files.empty() && !pkg.metadata.has_content())
        throw Error(ErrorKind::Validation, "package has neither payload files nor metadata content");
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    pkg.files = std::move(files);
    return pkg;
}

DataPackage validate_package(const fs::path& container)
{
    std::error_code ec;
    if (fs::is_directory(container, ec)) {
        auto meta_path = container / kMetadataFileName;
        if (!fs::is_regular_file(meta_path, ec))
            throw Error(ErrorKind::Validation, "container corrupt: missing metadata.json in " + container.string());
        auto meta = parse_metadata_bytes(read_file(meta_path));
        std::vector<PayloadFile> files;
        for (auto it = fs::recursive_directory_iterator(container); it != fs::recursive_directory_iterator(); ++it) {
            if (!it->is_regular_file() || it->is_symlink())
                continue;
            auto rel = fs::relative(it->path(), container).generic_string();
            if (rel == kMetadataFileName)
                continue;
            files.push_back({rel, read_file(it->path())});
        }
        return validate_package(meta, std::move(files));
    }
    if (!fs::is_regular_file(container, ec))
        throw Error(ErrorKind::Validation, "container not found: " + container.string());

    std::vector<tar::Entry> entries;
    try {
        entries = tar::read(read_file(container));
    } catch (const Error& e) {
        throw Error(ErrorKind::Validation, std::string("container corrupt: ") + e.what());
    }
    std::string prefix;
    auto has = [&](const std::string& n) {
        return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.name == n; });
    };
    if (!has(kMetadataFileName)) {
        for (const auto& e : entries) {
            auto slash = e.name.find('/');
            if (slash != std::string::npos && e.name.substr(slash + 1) == kMetadataFileName) {
                prefix = e.name.substr(0, slash + 1);
                break;
            }
        }
        if (prefix.empty())
            throw Error(ErrorKind::Validation, "container corrupt: archive has no metadata.json");
    }
    Json meta;
    std::vector<PayloadFile> files;
    for (auto& e : entries) {
        std::string name = e.name;
        if (name.rfind("./", 0) == 0)
            name = name.substr(2);
        if (!prefix.empty()) {
            if (name.rfind(prefix, 0) != 0)
                continue;
            name = name.substr(prefix.size());
        }
        if (name == kMetadataFileName)
            meta = parse_metadata_bytes(e.data);
        else
            files.push_back({name, std::move(e.data)});
    }
    return validate_package(meta, std::move(files));
}

std::string package_to_tar(const DataPackage& pkg)
{
    std::vector<tar::Entry> entries{{kMetadataFileName, metadata_to_json(pkg.metadata).dump(2)}};
    for (const auto& f : pkg.files)
        entries.push_back({f.name, f.data});
    return tar::write(entries);
}

} // namespace copilot::dataplane

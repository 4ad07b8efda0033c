// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/util.hpp"
#include "copilot/runtime/message.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace copilot::dataplane {

struct ExperimentConditions {
    std::optional<double> temperature_c;
    std::optional<std::string> catalyst_composition;
    std::optional<double> metal_loading_wt_pct;
    std::optional<std::string> synthesis_method;
    Json extras = Json::object();

    bool operator==(const ExperimentConditions&) const = default;
};

struct Provenance {
    std::optional<std::string> uploader;
    std::optional<std::string> timestamp;
    Json extras = Json::object();

    bool operator==(const Provenance&) const = default;
};

/// Every field except record_id may be null. Unknown keys survive a round trip via `extras`.
struct MetadataRecord {
    std::string record_id;
    std::optional<std::string> title;
    std::optional<std::string> description;
    std::optional<ExperimentConditions> experiment_conditions;
    std::optional<std::vector<std::string>> characterization_types;
    std::optional<std::vector<std::string>> degradation_mechanisms;
    std::optional<Provenance> provenance;
    Json extras = Json::object();

    bool operator==(const MetadataRecord&) const = default;

    /// True if any field other than record_id carries a value.
    bool has_content() const;
    /// Text the keyword index sees for this record (payload names appended by the caller).
    std::string searchable_text() const;
};

/// Lenient parse: numbers given as numeric strings and single strings in list
/// fields are accepted. Throws Error(Validation) naming the offending field.
MetadataRecord metadata_from_json(const Json& j);
Json metadata_to_json(const MetadataRecord& m);

struct PayloadFile {
    std::string name;  // relative path inside the package
    Bytes data;
};

struct DataPackage {
    MetadataRecord metadata;
    std::vector<PayloadFile> files;
};

inline constexpr const char* kMetadataFileName = "metadata.json";

/// Validates an in-memory package. Throws Error(Validation).
DataPackage validate_package(const Json& metadata, std::vector<PayloadFile> files);

/// Reads a package container: a directory or a ustar archive holding
/// metadata.json plus payload files. Throws Error(Validation) on a missing
/// record id or a corrupt container.
DataPackage validate_package(const std::filesystem::path& container);

/// Package bytes for an archive container.
std::string package_to_tar(const DataPackage& pkg);

} // namespace copilot::dataplane

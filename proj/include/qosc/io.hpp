#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qosc::io {

using json = nlohmann::ordered_json;

// Shortest text that parses back to the same double.
std::string format_double(double v);

TypeDistribution dist_from_json(const json& j);
json dist_to_json(const TypeDistribution& d);

// Support bounds default to the distribution's when absent.
ModelParams params_from_json(const json& j, const TypeDistribution* dist = nullptr);
json params_to_json(const ModelParams& p);

json report_to_json(const VerificationReport& r);
json menu_meta(const ContractMenu& menu);

void write_menu_csv(const std::filesystem::path& path, const ContractMenu& menu,
                    bool pooled_column);
// Reads `delta,q,p[,pooled]`; a `<stem>.meta.json` sidecar next to the file,
// when present, restores beta, pooling intervals and provenance.
ContractMenu read_menu_csv(const std::filesystem::path& path);
std::filesystem::path meta_path_for(const std::filesystem::path& menu_csv);

std::vector<HistogramBin> read_histogram_csv(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace qosc::io

// io.hpp — run manifests and reproducible tabular output
//
// Every output file embeds a manifest header; the data section below the
// `# data` marker is byte-identical across reruns with the same config, seed,
// and version (timestamps live in the header only).  Files are written
// atomically (temp file + rename).  Floats are serialized with 17 significant
// digits so they round-trip exactly.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravdec/model.hpp"

namespace gravdec::io {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kDataMarker = "# data";

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::string version = kVersion;
    std::string subcommand;
    std::string started;  // ISO-8601, header-only (excluded from comparisons)
    std::string finished;
    std::vector<std::string> outputs;
};

RunManifest make_manifest(const nlohmann::json& config, std::uint64_t seed,
                          const std::string& subcommand);
void stamp_finished(RunManifest& manifest);

std::string format_double(double v); // %.17g

class CsvWriter {
public:
    CsvWriter(RunManifest manifest, std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    void add_comment(const std::string& line); // footer comment after the rows

    // atomic write; returns the final path
    std::filesystem::path write(const std::filesystem::path& path);

private:
    RunManifest manifest_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::string> footer_;
};

// JSON report: {"manifest": {...}, "data": ...}; manifest carries timestamps,
// data is the comparable section.
std::filesystem::path write_json_report(const RunManifest& manifest,
                                        const nlohmann::json& data,
                                        const std::filesystem::path& path);

// Data section of a written file (bytes after the data marker for CSV, the
// canonical "data" dump for JSON reports); reproducibility checks compare this.
std::string data_section(const std::filesystem::path& path);

} // namespace gravdec::io

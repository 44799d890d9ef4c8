#include "gravdec/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gravdec/errors.hpp"
#include "gravdec/hash.hpp"

namespace gravdec::io {

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("io: cannot open " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("io: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

RunManifest make_manifest(const nlohmann::json& config, std::uint64_t seed,
                          const std::string& subcommand) {
    RunManifest m;
    m.config_hash = fnv1a64(config.dump()); // canonical: nlohmann sorts object keys
    m.master_seed = seed;
    m.subcommand = subcommand;
    m.started = now_iso8601();
    return m;
}

void stamp_finished(RunManifest& manifest) { manifest.finished = now_iso8601(); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(RunManifest manifest, std::vector<std::string> columns)
    : manifest_(std::move(manifest)), columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: row width mismatch");
    rows_.push_back(values);
}

void CsvWriter::add_comment(const std::string& line) { footer_.push_back("# " + line); }

std::filesystem::path CsvWriter::write(const std::filesystem::path& path) {
    std::ostringstream out;
    out << "# gravdec " << manifest_.version << "\n";
    out << "# subcommand: " << manifest_.subcommand << "\n";
    out << "# config-hash: " << manifest_.config_hash << "\n";
    out << "# seed: " << manifest_.master_seed << "\n";
    out << "# started: " << manifest_.started << "\n";
    out << "# finished: " << manifest_.finished << "\n";
    out << kDataMarker << "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c)
        out << columns_[c] << (c + 1 < columns_.size() ? "," : "\n");
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    for (const auto& line : footer_) out << line << "\n";
    atomic_write(path, out.str());
    return path;
}

std::filesystem::path write_json_report(const RunManifest& manifest,
                                        const nlohmann::json& data,
                                        const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["manifest"]["version"] = manifest.version;
    doc["manifest"]["subcommand"] = manifest.subcommand;
    doc["manifest"]["config_hash"] = manifest.config_hash;
    doc["manifest"]["seed"] = manifest.master_seed;
    doc["manifest"]["started"] = manifest.started;
    doc["manifest"]["finished"] = manifest.finished;
    doc["data"] = data;
    atomic_write(path, doc.dump(2) + "\n");
    return path;
}

std::string data_section(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string content = ss.str();

    if (!content.empty() && content.front() == '{') {
        const auto doc = nlohmann::json::parse(content);
        return doc.at("data").dump();
    }
    const std::string marker = std::string(kDataMarker) + "\n";
    const auto pos = content.find(marker);
    if (pos == std::string::npos)
        throw std::runtime_error("io: no data section in " + path.string());
    return content.substr(pos + marker.size());
}

} // namespace gravdec::io

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"
#include "fileio.hpp"

namespace spreadlab {

inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// A report is a rectangular table of pre-formatted strings; both the CSV
/// and JSON writers emit the same fields verbatim so the two formats agree
/// record for record.
struct ReportTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv(const ReportTable& table) {
  std::string out = csv_join(table.header);
  for (const auto& row : table.rows) out += csv_join(row);
  return out;
}

inline std::string to_json_records(const ReportTable& table) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (size_t i = 0; i < table.header.size() && i < row.size(); ++i)
      obj[table.header[i]] = row[i];
    records.push_back(std::move(obj));
  }
  return records.dump(2) + "\n";
}

enum class ReportFormat { Csv, Json };

struct ManifestEntry {
  std::string file;
  size_t rows = 0;
  std::string content_hash;
};

/// Writes one table (atomically) and reports its manifest entry.
inline ManifestEntry emit_table(const std::filesystem::path& dir, const std::string& stem,
                                const ReportTable& table, ReportFormat format) {
  std::string name = stem + (format == ReportFormat::Csv ? ".csv" : ".json");
  std::string content = format == ReportFormat::Csv ? to_csv(table) : to_json_records(table);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  atomic_write_file(dir / name, content);
  return {name, table.rows.size(), hex64(fnv1a64(content))};
}

inline void emit_manifest(const std::filesystem::path& dir,
                          std::vector<ManifestEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.file < b.file; });
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : entries)
    files.push_back({{"file", e.file}, {"rows", e.rows}, {"hash", e.content_hash}});
  nlohmann::json manifest{{"files", files}};
  atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace spreadlab

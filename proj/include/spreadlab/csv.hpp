#pragma once

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace spreadlab {

/// Splits one CSV record. Handles quoted fields with doubled quotes; no
/// embedded newlines (the formats here are all single-line records).
inline std::vector<std::string> csv_split(std::string_view line, long line_no = 0) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote in CSV record", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

/// Header -> column index map; extra columns are allowed and ignored.
class CsvHeader {
 public:
  explicit CsvHeader(std::string_view header_line) {
    auto names = csv_split(header_line, 1);
    for (size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  size_t require(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ParseError("missing CSV column '" + name + "'", 1);
    return it->second;
  }

 private:
  std::map<std::string, size_t, std::less<>> index_;
};

inline std::string shortest_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace spreadlab

#pragma once

#include <charconv>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace spreadlab {

/// Minimal TOML reader covering the subset the file formats here use:
/// comments, [tables], [[arrays of tables]], dotted table headers, and
/// key = scalar | array-of-scalars. Strings are basic ("...") only.
class TomlValue {
 public:
  using Array = std::vector<TomlValue>;
  using Table = std::map<std::string, TomlValue>;

  TomlValue() : value_(Table{}) {}
  explicit TomlValue(bool b) : value_(b) {}
  explicit TomlValue(int64_t i) : value_(i) {}
  explicit TomlValue(double d) : value_(d) {}
  explicit TomlValue(std::string s) : value_(std::move(s)) {}
  explicit TomlValue(Array a) : value_(std::move(a)) {}
  explicit TomlValue(Table t) : value_(std::move(t)) {}

  bool is_table() const { return std::holds_alternative<Table>(value_); }
  bool is_array() const { return std::holds_alternative<Array>(value_); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_number() const {
    return std::holds_alternative<int64_t>(value_) || std::holds_alternative<double>(value_);
  }

  bool as_bool() const {
    if (auto* b = std::get_if<bool>(&value_)) return *b;
    throw ParseError("TOML value is not a boolean");
  }
  int64_t as_int() const {
    if (auto* i = std::get_if<int64_t>(&value_)) return *i;
    throw ParseError("TOML value is not an integer");
  }
  double as_double() const {
    if (auto* d = std::get_if<double>(&value_)) return *d;
    if (auto* i = std::get_if<int64_t>(&value_)) return static_cast<double>(*i);
    throw ParseError("TOML value is not a number");
  }
  const std::string& as_string() const {
    if (auto* s = std::get_if<std::string>(&value_)) return *s;
    throw ParseError("TOML value is not a string");
  }
  const Array& as_array() const {
    if (auto* a = std::get_if<Array>(&value_)) return *a;
    throw ParseError("TOML value is not an array");
  }
  const Table& as_table() const {
    if (auto* t = std::get_if<Table>(&value_)) return *t;
    throw ParseError("TOML value is not a table");
  }
  Table& table() {
    if (auto* t = std::get_if<Table>(&value_)) return *t;
    throw ParseError("TOML value is not a table");
  }
  Array& array() {
    if (auto* a = std::get_if<Array>(&value_)) return *a;
    throw ParseError("TOML value is not an array");
  }

  bool contains(const std::string& key) const {
    return is_table() && as_table().count(key) > 0;
  }
  const TomlValue& at(const std::string& key) const {
    auto& t = as_table();
    auto it = t.find(key);
    if (it == t.end()) throw ParseError("missing TOML key '" + key + "'");
    return it->second;
  }

 private:
  std::variant<bool, int64_t, double, std::string, Array, Table> value_;
};

namespace toml_detail {

inline std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

/// Removes a trailing comment that is not inside a string.
inline std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

inline std::string parse_basic_string(std::string_view s, long line_no) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw ParseError("bad TOML string " + std::string(s), line_no);
  std::string out;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\' && i + 2 < s.size()) {
      char n = s[++i];
      switch (n) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ParseError("unsupported TOML escape", line_no);
      }
    } else {
      out += c;
    }
  }
  return out;
}

TomlValue parse_scalar(std::string_view s, long line_no);

inline TomlValue parse_value(std::string_view s, long line_no) {
  s = strip(s);
  if (s.empty()) throw ParseError("empty TOML value", line_no);
  if (s.front() == '[') {
    if (s.back() != ']') throw ParseError("unterminated TOML array", line_no);
    TomlValue::Array items;
    std::string_view body = s.substr(1, s.size() - 2);
    size_t depth = 0, start = 0;
    bool in_str = false;
    for (size_t i = 0; i <= body.size(); ++i) {
      bool at_end = i == body.size();
      char c = at_end ? ',' : body[i];
      if (!at_end && c == '"' && (i == 0 || body[i - 1] != '\\')) in_str = !in_str;
      if (!in_str && c == '[') ++depth;
      if (!in_str && c == ']') --depth;
      if (c == ',' && depth == 0 && !in_str) {
        auto item = strip(body.substr(start, i - start));
        if (!item.empty()) items.push_back(parse_value(item, line_no));
        start = i + 1;
      }
    }
    return TomlValue(std::move(items));
  }
  return parse_scalar(s, line_no);
}

inline TomlValue parse_scalar(std::string_view s, long line_no) {
  if (s.front() == '"') return TomlValue(parse_basic_string(s, line_no));
  if (s == "true") return TomlValue(true);
  if (s == "false") return TomlValue(false);
  std::string cleaned;
  for (char c : s)
    if (c != '_') cleaned += c;
  bool looks_float = cleaned.find_first_of(".eE") != std::string::npos;
  if (!looks_float) {
    int64_t iv = 0;
    auto res = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), iv);
    if (res.ec == std::errc() && res.ptr == cleaned.data() + cleaned.size())
      return TomlValue(iv);
  }
  double dv = 0;
  auto res = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), dv);
  if (res.ec == std::errc() && res.ptr == cleaned.data() + cleaned.size())
    return TomlValue(dv);
  throw ParseError("cannot parse TOML value '" + std::string(s) + "'", line_no);
}

inline std::vector<std::string> split_dotted_key(std::string_view s, long line_no) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_str = false;
  for (char c : s) {
    if (c == '"') {
      in_str = !in_str;
    } else if (c == '.' && !in_str) {
      parts.push_back(std::string(strip(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(std::string(strip(cur)));
  for (const auto& p : parts)
    if (p.empty()) throw ParseError("empty TOML key component", line_no);
  return parts;
}

}  // namespace toml_detail

inline TomlValue parse_toml(std::string_view text) {
  using namespace toml_detail;
  TomlValue root;
  TomlValue* current = &root;

  auto descend = [](TomlValue* node, const std::vector<std::string>& path,
                    bool array_of_tables, long line_no) -> TomlValue* {
    for (size_t i = 0; i < path.size(); ++i) {
      auto& table = node->table();
      auto [it, inserted] = table.try_emplace(path[i], TomlValue());
      bool last = i + 1 == path.size();
      if (last && array_of_tables) {
        if (inserted) it->second = TomlValue(TomlValue::Array{});
        if (!it->second.is_array())
          throw ParseError("TOML key '" + path[i] + "' is not an array of tables", line_no);
        it->second.array().push_back(TomlValue());
        node = &it->second.array().back();
      } else {
        if (it->second.is_array() && !it->second.array().empty())
          node = &it->second.array().back();
        else
          node = &it->second;
        if (!node->is_table())
          throw ParseError("TOML key '" + path[i] + "' is not a table", line_no);
      }
    }
    return node;
  };

  long line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view raw =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      bool aot = line.size() > 1 && line[1] == '[';
      size_t close = line.rfind(aot ? "]]" : "]");
      if (close == std::string_view::npos)
        throw ParseError("unterminated TOML table header", line_no);
      auto inner = strip(line.substr(aot ? 2 : 1, close - (aot ? 2 : 1)));
      current = descend(&root, split_dotted_key(inner, line_no), aot, line_no);
      continue;
    }

    size_t eq = std::string_view::npos;
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '=' && !in_str) {
        eq = i;
        break;
      }
    }
    if (eq == std::string_view::npos)
      throw ParseError("expected key = value", line_no);
    auto keys = split_dotted_key(strip(line.substr(0, eq)), line_no);
    TomlValue* holder = current;
    for (size_t i = 0; i + 1 < keys.size(); ++i) {
      auto [it, _] = holder->table().try_emplace(keys[i], TomlValue());
      holder = &it->second;
      if (!holder->is_table()) throw ParseError("TOML key collision", line_no);
    }
    auto key = keys.back();
    if (holder->table().count(key))
      throw ParseError("duplicate TOML key '" + key + "'", line_no);
    holder->table().emplace(key, parse_value(line.substr(eq + 1), line_no));
  }
  return root;
}

}  // namespace spreadlab

#pragma once

// Minimal TOML subset for run configs: [table] headers, key = value with
// numbers, "strings", booleans and flat numeric arrays (which may span lines),
// and # comments.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/io.hpp"

namespace nloc::toml {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

class Table {
 public:
  Table() = default;
  explicit Table(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::map<std::string, Value>& values() const { return values_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }

  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  double number(const std::string& key) const { return get<double>(key, "a number"); }

  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }
  long integer(const std::string& key) const {
    const double x = number(key);
    if (x != std::floor(x) || std::abs(x) > 9e15) throw ConfigError(where(key) + " must be an integer");
    return static_cast<long>(x);
  }

  bool boolean(const std::string& key, bool fallback) const { return has(key) ? get<bool>(key, "a boolean") : fallback; }

  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }
  std::string string(const std::string& key) const { return get<std::string>(key, "a string"); }

  std::vector<double> numbers(const std::string& key) const { return get<std::vector<double>>(key, "an array"); }

  /// Throws if any key was never read (catches misspelt parameters).
  void reject_unused() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError("unknown key " + where(k));
  }

 private:
  template <class T>
  const T& get(const std::string& key, const char* what) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key " + where(key));
    used_.insert(key);
    const T* p = std::get_if<T>(&it->second);
    if (!p) throw ConfigError(where(key) + " must be " + what);
    return *p;
  }

  std::string where(const std::string& key) const { return "'" + (name_.empty() ? key : name_ + "." + key) + "'"; }

  std::string name_;
  std::map<std::string, Value> values_;
  mutable std::set<std::string> used_;
};

class Document {
 public:
  std::map<std::string, Table> tables;

  bool has(const std::string& name) const { return tables.count(name) != 0; }

  const Table& table(const std::string& name) const {
    const auto it = tables.find(name);
    if (it == tables.end()) throw ConfigError("config has no [" + name + "] table");
    return it->second;
  }

  /// Sorted "table.key = value" lines with round-trip number formatting.
  std::string canonical() const {
    std::string out;
    for (const auto& [tn, t] : tables)
      for (const auto& [k, v] : t.values()) out += (tn.empty() ? k : tn + "." + k) + " = " + format(v) + "\n";
    return out;
  }

  static std::string format(const Value& v) {
    auto num = [](double x) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return std::string(buf);
    };
    if (const auto* d = std::get_if<double>(&v)) return num(*d);
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* s = std::get_if<std::string>(&v)) {
      std::string q = "\"";
      for (char c : *s) q += (c == '"' || c == '\\') ? std::string("\\") + c : std::string(1, c);
      return q + "\"";
    }
    std::string a = "[";
    const auto& xs = std::get<std::vector<double>>(v);
    for (std::size_t k = 0; k < xs.size(); ++k) a += (k ? ", " : "") + num(xs[k]);
    return a + "]";
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// Drops a trailing comment outside string literals.
inline std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '\\' && in_str) {
      ++k;
    } else if (s[k] == '"') {
      in_str = !in_str;
    } else if (s[k] == '#' && !in_str) {
      return s.substr(0, k);
    }
  }
  return s;
}

inline bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

inline double parse_number(std::string s, const std::string& ctx) {
  std::erase(s, '_');
  if (s == "inf" || s == "+inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  const char* b = s.data() + (s.size() && s[0] == '+' ? 1 : 0);
  double x = 0;
  const auto [p, ec] = std::from_chars(b, s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ConfigError(ctx + ": cannot parse '" + s + "'");
  return x;
}

inline Value parse_value(const std::string& raw, const std::string& ctx) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(ctx + ": missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') {
    std::string out;
    std::size_t k = 1;
    for (; k < s.size() && s[k] != '"'; ++k) {
      if (s[k] == '\\') {
        if (++k >= s.size()) break;
        const char c = s[k];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += s[k];
      }
    }
    if (k + 1 != s.size()) throw ConfigError(ctx + ": malformed string");
    return out;
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(ctx + ": unterminated array");
    std::vector<double> xs;
    std::stringstream in(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (in.eof()) break;  // trailing comma
        throw ConfigError(ctx + ": empty array element");
      }
      xs.push_back(parse_number(item, ctx));
    }
    return xs;
  }
  return parse_number(s, ctx);
}

}  // namespace detail

inline Document parse(const std::string& text, const std::string& source = "config") {
  Document doc;
  std::string current;
  doc.tables[current] = Table(current);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string ctx = source + ":" + std::to_string(lineno);
    std::string s = detail::trim(detail::strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(ctx + ": malformed table header");
      current = detail::trim(s.substr(1, s.size() - 2));
      if (!detail::valid_key(current)) throw ConfigError(ctx + ": bad table name '" + current + "'");
      if (doc.tables.count(current)) throw ConfigError(ctx + ": duplicate table [" + current + "]");
      doc.tables[current] = Table(current);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(ctx + ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    if (!detail::valid_key(key)) throw ConfigError(ctx + ": bad key '" + key + "'");
    std::string rhs = detail::trim(s.substr(eq + 1));
    // arrays may continue over following lines
    if (!rhs.empty() && rhs.front() == '[') {
      while (rhs.back() != ']') {
        if (!std::getline(in, line)) throw ConfigError(ctx + ": unterminated array");
        ++lineno;
        rhs += " " + detail::trim(detail::strip_comment(line));
        rhs = detail::trim(rhs);
      }
    }
    auto& t = doc.tables[current];
    if (t.has(key)) throw ConfigError(ctx + ": duplicate key '" + key + "'");
    t.set(key, detail::parse_value(rhs, ctx));
  }
  if (doc.tables[""].values().empty()) doc.tables.erase("");
  return doc;
}

inline Document parse_file(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError&) {
    throw IoError("cannot read config '" + path + "'");
  }
  return parse(text, path);
}

}  // namespace nloc::toml

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlm/errors.hpp"

namespace qlm {

/// Deterministic 12-significant-digit float formatting shared by JSON and CSV
/// so identical inputs produce bitwise-identical outputs.
inline std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  if (!std::isfinite(x))
    throw Error("cli", "non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

/// Streaming writer for a JSON object with ordered keys.  Values are either
/// scalars or pre-rendered JSON fragments (nested objects/arrays).
class JsonObject {
 public:
  JsonObject& field(const std::string& k, double v) {
    return raw(k, format_number(v));
  }
  JsonObject& field(const std::string& k, int v) { return raw(k, std::to_string(v)); }
  JsonObject& field(const std::string& k, bool v) { return raw(k, v ? "true" : "false"); }
  JsonObject& field(const std::string& k, const std::string& v) {
    return raw(k, "\"" + json_escape(v) + "\"");
  }
  JsonObject& field(const std::string& k, const char* v) {
    return field(k, std::string(v));
  }
  JsonObject& field(const std::string& k, const std::map<std::string, double>& m) {
    JsonObject sub;
    for (const auto& [key, val] : m) sub.field(key, val);
    return raw(k, sub.str());
  }
  JsonObject& raw(const std::string& k, const std::string& fragment) {
    if (!first_) os_ << ", ";
    first_ = false;
    os_ << '"' << json_escape(k) << "\": " << fragment;
    return *this;
  }
  std::string str() const { return "{" + os_.str() + "}"; }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

class JsonArray {
 public:
  JsonArray& push(double v) { return raw(format_number(v)); }
  JsonArray& push(const JsonObject& o) { return raw(o.str()); }
  JsonArray& raw(const std::string& fragment) {
    if (!first_) os_ << ", ";
    first_ = false;
    os_ << fragment;
    return *this;
  }
  std::string str() const { return "[" + os_.str() + "]"; }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

inline std::string render_csv(const std::vector<std::string>& header,
                              const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw Error("cli", "csv row width does not match header");
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  return os.str();
}

/// Writes text to path, or stdout when path is empty.
inline void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cli", "cannot open output file: " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

}  // namespace qlm

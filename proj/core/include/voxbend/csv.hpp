#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace voxbend {

// %.17g: shortest form that round-trips IEEE doubles exactly, used for every
// serialized double so artifacts re-parse bit-identically.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += fields[i];
  }
  return out;
}

bool write_text_file(const std::string& path, const std::string& content,
                     std::string* error = nullptr);
bool append_text_file(const std::string& path, const std::string& content,
                      std::string* error = nullptr);
bool read_text_file(const std::string& path, std::string& out, std::string* error = nullptr);

}  // namespace voxbend

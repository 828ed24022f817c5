#include "voxbend/csv.hpp"

#include <fstream>
#include <sstream>

namespace voxbend {

bool write_text_file(const std::string& path, const std::string& content,
                     std::string* error) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    if (error) *error = "cannot open " + path + " for writing";
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    if (error) *error = "write failed for " + path;
    return false;
  }
  return true;
}

bool append_text_file(const std::string& path, const std::string& content,
                      std::string* error) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    if (error) *error = "cannot open " + path + " for appending";
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    if (error) *error = "append failed for " + path;
    return false;
  }
  return true;
}

bool read_text_file(const std::string& path, std::string& out, std::string* error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (error) *error = "cannot open " + path + " for reading";
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    if (error) *error = "read failed for " + path;
    return false;
  }
  out = buf.str();
  return true;
}

}  // namespace voxbend

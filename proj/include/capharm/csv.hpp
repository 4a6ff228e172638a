// SPDX-License-Identifier: Apache-2.0
//
// Small CSV helpers shared by the exporters. All files are UTF-8 with LF
// line endings and 17-significant-digit decimals so that reruns with the
// same seeds are byte-identical.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "capharm/errors.hpp"

namespace capharm {

// 17 significant decimal digits: round-trips any IEEE double.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw data_error("cannot open output file: " + path);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open input file: " + path);
  return in;
}

inline std::vector<std::string> split_fields(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw data_error("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw data_error("cannot parse number '" + s + "' (" + context + ")");
  }
}

inline long parse_long(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw data_error("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw data_error("cannot parse integer '" + s + "' (" + context + ")");
  }
}

}  // namespace capharm

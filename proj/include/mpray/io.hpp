// Deterministic CSV output: values are printed with shortest round-trip
// formatting so identical computations produce identical bytes.
#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "mpray/error.hpp"
#include "mpray/util.hpp"

namespace mpray {

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << num_str(row[i]);
    }
    out << '\n';
  }
}

inline std::ofstream open_output_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

}  // namespace mpray

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cslab/scalar_field.hpp"

namespace cslab {

/// Shortest round-trip decimal form of a double (%.17g).
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json grid_to_json(const HemisphereGrid& grid) {
  return nlohmann::json{{"s", grid.params.s},
                        {"n_theta", grid.n_theta()},
                        {"n_phi", grid.n_phi},
                        {"grading_gamma", grid.grading_gamma}};
}

inline void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << "theta_index,phi_index,value\n";
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) {
      out << j << ',' << i << ',' << fmt_double(f.at(j, i)) << '\n';
    }
  }
}

/// Reads a field CSV; the grid supplies the expected shape. Malformed rows are
/// rejected with their line number.
inline ScalarField read_field_csv(const HemisphereGrid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  ScalarField f = make_field(grid);
  std::string line;
  int lineno = 0;
  std::vector<bool> seen(f.values.size(), false);
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("theta_index", 0) == 0) continue;
    if (line.empty()) continue;
    int j, i;
    double v;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &j, &i, &v) != 3) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed field row");
    }
    if (j < 0 || j >= f.n_theta || i < 0 || i >= f.n_phi) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": index out of range");
    }
    f.at(j, i) = v;
    seen[j * f.n_phi + i] = true;
  }
  for (size_t idx = 0; idx < seen.size(); ++idx) {
    if (!seen[idx]) {
      throw ValidationError(path + ": missing node (" + std::to_string(idx / f.n_phi) + "," +
                            std::to_string(idx % f.n_phi) + ")");
    }
  }
  return f;
}

/// Flat binary of 64-bit floats, row-major (theta outer, phi inner).
inline void write_field_binary(const ScalarField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

inline ScalarField read_field_binary(const HemisphereGrid& grid, const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw ValidationError("cannot open " + path);
  const auto bytes = static_cast<size_t>(in.tellg());
  ScalarField f = make_field(grid);
  if (bytes != f.values.size() * sizeof(double)) {
    throw ValidationError(path + ": size mismatch, expected " +
                          std::to_string(f.values.size() * sizeof(double)) + " bytes");
  }
  in.seekg(0);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(bytes));
  return f;
}

}  // namespace cslab

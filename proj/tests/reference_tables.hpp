#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Rows of the reference level 4-7 eigenvalue tables: an index range, the
// value and multiplicity at each level, and the extrapolated value.
struct TableRow {
  std::size_t start = 0, end = 0;
  std::array<double, 4> value{};
  std::array<int, 4> mult{};
  double extrap = 0.0;

  std::size_t size() const { return end - start + 1; }
};

inline std::vector<TableRow> load_reference_tables(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> f;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw std::runtime_error("bad row: " + line);
    TableRow r;
    r.start = std::stoul(f[0]);
    r.end = std::stoul(f[1]);
    for (int l = 0; l < 4; ++l) {
      r.value[l] = std::stod(f[2 + 2 * l]);
      r.mult[l] = std::stoi(f[3 + 2 * l]);
    }
    r.extrap = std::stod(f[10]);
    rows.push_back(r);
  }
  return rows;
}

inline std::string reference_tables_path() { return std::string(FRACTAL_SPECTRA_TEST_DATA) + "/reference_tables.csv"; }

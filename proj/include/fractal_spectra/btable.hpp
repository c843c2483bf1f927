#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fractal_spectra/word.hpp"

namespace fractal_spectra {

// Integer weights b(w, j) for the 3^m address triangles of one level.
// Corner angles follow as pi/3 + (b - 1) pi / 3^{m+1}.
class BTable {
 public:
  explicit BTable(int level);

  int level() const { return level_; }
  std::size_t word_count() const { return entries_.size() / 3; }

  std::int64_t operator()(const Word& w, int j) const { return at(w.index(), j); }
  std::int64_t at(std::size_t word_index, int j) const {
    return entries_[3 * word_index + static_cast<std::size_t>(j)];
  }
  void set(const Word& w, int j, std::int64_t b) { set(w.index(), j, b); }
  void set(std::size_t word_index, int j, std::int64_t b) {
    entries_[3 * word_index + static_cast<std::size_t>(j)] = b;
  }

  bool operator==(const BTable&) const = default;

 private:
  int level_;
  std::vector<std::int64_t> entries_;
};

// Reads the binary digits of n as ternary digits and appends a trailing 0:
// 3 * sum 3^{J_k} for n = sum 2^{J_k}. Throws std::overflow_error past int64.
std::int64_t b_from_binary(std::uint64_t n);

// b(w, 0) for a word 0w~ over {0, 1}: b_from_binary(2^{m-1} - value(w)).
std::int64_t boundary_b(const Word& w);

constexpr int kMaxLevel = 12;

// Throws ConditionViolation if the constructed table fails any check.
BTable build_btable(int level);

struct Counterexample {
  Word word;
  int corner = 0;
  std::int64_t expected = 0;
  std::int64_t got = 0;
  std::string detail;
};

struct ConditionResult {
  std::string name;  // "sum", "vertex", "corner", "symmetry", "digits"
  bool passed = true;
  std::size_t violations = 0;
  std::optional<Counterexample> first;
};

struct TheoremReport {
  std::vector<ConditionResult> conditions;

  bool all_passed() const;
  const ConditionResult& operator[](std::string_view name) const;
  std::string summary() const;
};

TheoremReport verify_theorem_conditions(const BTable& t);

// Corner angles in radians, three per word.
class AngleTable {
 public:
  AngleTable(int level, std::vector<double> angles);

  // The single equilateral triangle of level 0.
  static AngleTable equilateral();

  int level() const { return level_; }
  std::size_t word_count() const { return angles_.size() / 3; }
  double operator()(const Word& w, int j) const { return at(w.index(), j); }
  double at(std::size_t word_index, int j) const {
    return angles_[3 * word_index + static_cast<std::size_t>(j)];
  }

 private:
  int level_;
  std::vector<double> angles_;
};

// Throws GeometryError when an angle leaves (0, pi).
AngleTable angles_from_btable(const BTable& t);

// Angles for level m, including the equilateral level 0.
AngleTable angles_for_level(int level);

nlohmann::json to_json(const BTable& t);
BTable btable_from_json(const nlohmann::json& j);

}  // namespace fractal_spectra

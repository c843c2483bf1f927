#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fractal_spectra {

// Permutation of the corner labels {0,1,2}: label d maps to p[d].
using Perm3 = std::array<int, 3>;

constexpr Perm3 kIdentity3 = {0, 1, 2};

Perm3 compose(const Perm3& outer, const Perm3& inner);  // outer ∘ inner
Perm3 inverse(const Perm3& p);
bool is_odd(const Perm3& p);
const std::array<Perm3, 6>& all_perm3();

std::size_t ipow3(int e);

// Ternary address of a subtriangle; word w names F_{w_1}∘…∘F_{w_m}(T).
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint8_t> digits);

  static Word from_string(std::string_view s);
  // Base-3 number with the first digit most significant.
  static Word from_index(std::size_t index, int length);
  static Word constant(int digit, int length);

  int length() const { return static_cast<int>(digits_.size()); }
  bool empty() const { return digits_.empty(); }
  int operator[](int i) const { return digits_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint8_t>& digits() const { return digits_; }

  std::size_t index() const;
  std::string to_string() const;

  Word permuted(const Perm3& p) const;
  Word appended(int digit) const;
  Word prefixed(int digit) const;
  Word prefix(int n) const;
  Word suffix_from(int n) const;

  bool contains(int digit) const;
  // True when every digit is in {a, b}.
  bool uses_only(int a, int b) const;

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<std::uint8_t> digits_;
};

}  // namespace fractal_spectra

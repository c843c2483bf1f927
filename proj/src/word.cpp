#include "fractal_spectra/word.hpp"

#include <stdexcept>

namespace fractal_spectra {

Perm3 compose(const Perm3& outer, const Perm3& inner) {
  return {outer[inner[0]], outer[inner[1]], outer[inner[2]]};
}

Perm3 inverse(const Perm3& p) {
  Perm3 q{};
  for (int i = 0; i < 3; ++i) q[p[i]] = i;
  return q;
}

bool is_odd(const Perm3& p) {
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 1;
}

const std::array<Perm3, 6>& all_perm3() {
  static const std::array<Perm3, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  return perms;
}

std::size_t ipow3(int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

Word::Word(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
  for (auto d : digits_)
    if (d > 2) throw std::invalid_argument("word digit out of range");
}

Word Word::from_string(std::string_view s) {
  std::vector<std::uint8_t> d;
  d.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '2')
      throw std::invalid_argument("invalid word '" + std::string(s) + "'");
    d.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Word(std::move(d));
}

Word Word::from_index(std::size_t index, int length) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % 3);
    index /= 3;
  }
  if (index != 0) throw std::invalid_argument("word index too large");
  Word w;
  w.digits_ = std::move(d);
  return w;
}

Word Word::constant(int digit, int length) {
  return Word(std::vector<std::uint8_t>(static_cast<std::size_t>(length),
                                        static_cast<std::uint8_t>(digit)));
}

std::size_t Word::index() const {
  std::size_t r = 0;
  for (auto d : digits_) r = 3 * r + d;
  return r;
}

std::string Word::to_string() const {
  std::string s;
  s.reserve(digits_.size());
  for (auto d : digits_) s.push_back(static_cast<char>('0' + d));
  return s;
}

Word Word::permuted(const Perm3& p) const {
  Word w = *this;
  for (auto& d : w.digits_) d = static_cast<std::uint8_t>(p[d]);
  return w;
}

Word Word::appended(int digit) const {
  Word w = *this;
  w.digits_.push_back(static_cast<std::uint8_t>(digit));
  return w;
}

Word Word::prefixed(int digit) const {
  Word w;
  w.digits_.reserve(digits_.size() + 1);
  w.digits_.push_back(static_cast<std::uint8_t>(digit));
  w.digits_.insert(w.digits_.end(), digits_.begin(), digits_.end());
  return w;
}

Word Word::prefix(int n) const {
  Word w;
  w.digits_.assign(digits_.begin(), digits_.begin() + n);
  return w;
}

Word Word::suffix_from(int n) const {
  Word w;
  w.digits_.assign(digits_.begin() + n, digits_.end());
  return w;
}

bool Word::contains(int digit) const {
  for (auto d : digits_)
    if (d == digit) return true;
  return false;
}

bool Word::uses_only(int a, int b) const {
  for (auto d : digits_)
    if (d != a && d != b) return false;
  return true;
}

}  // namespace fractal_spectra

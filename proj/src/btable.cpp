#include "fractal_spectra/btable.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("b-value overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("b-value overflow");
  return r;
}

std::uint64_t binary_value(const Word& w) {
  std::uint64_t v = 0;
  for (auto d : w.digits()) v = 2 * v + d;
  return v;
}

// Row (b(0w~,0), b(0w~,1), b(0w~,2)) for w~ over {0,1}.
std::array<std::int64_t, 3> boundary_row(const Word& w) {
  const std::uint64_t n = (std::uint64_t{1} << (w.length() - 1)) -
                          binary_value(w.suffix_from(1));
  const std::int64_t bn = b_from_binary(n);
  const std::int64_t bp = b_from_binary(n - 1);
  return {bn, -bp, checked_add(checked_add(3, -bn), bp)};
}

// Words not starting with 0 are images of words starting with 0 under (0 i).
void fill_by_symmetry(BTable& t) {
  const int m = t.level();
  for (std::size_t k = 0; k < t.word_count(); ++k) {
    const Word w = Word::from_index(k, m);
    if (w[0] == 0) continue;
    Perm3 s = kIdentity3;
    std::swap(s[0], s[w[0]]);
    const Word base = w.permuted(s);
    for (int j = 0; j < 3; ++j) t.set(k, j, t(base, s[j]));
  }
}

BTable next_level(const BTable& prev) {
  const int m = prev.level() + 1;
  BTable t(m);
  const std::size_t tails = ipow3(m - 1);
  for (std::size_t k = 0; k < tails; ++k) {
    const Word tail = Word::from_index(k, m - 1);
    const Word w = tail.prefixed(0);
    if (tail.uses_only(0, 1)) {
      const auto row = boundary_row(w);
      for (int j = 0; j < 3; ++j) t.set(w, j, row[j]);
    } else if (tail.uses_only(0, 2)) {
      const Perm3 tau = {0, 2, 1};
      const auto row = boundary_row(w.permuted(tau));
      for (int j = 0; j < 3; ++j) t.set(w, j, row[tau[j]]);
    } else {
      // Either the tail starts with 1 or 2 (copy of the previous level), or it
      // starts with 0 and contains both 1 and 2 (same copy rule).
      const Word shorter = tail.suffix_from(1).prefixed(0);
      for (int j = 0; j < 3; ++j) t.set(w, j, prev(shorter, j));
    }
  }
  fill_by_symmetry(t);
  return t;
}

bool has_binary_ternary_digits(std::int64_t b) {
  std::uint64_t a = b < 0 ? static_cast<std::uint64_t>(-b) : static_cast<std::uint64_t>(b);
  while (a != 0) {
    if (a % 3 == 2) return false;
    a /= 3;
  }
  return true;
}

void record(ConditionResult& r, Counterexample c) {
  r.passed = false;
  if (r.violations++ == 0) r.first = std::move(c);
}

}  // namespace

BTable::BTable(int level) : level_(level) {
  if (level < 0 || level > kMaxLevel)
    throw std::invalid_argument("b-table level out of range");
  entries_.assign(3 * ipow3(level), 0);
}

std::int64_t b_from_binary(std::uint64_t n) {
  std::int64_t result = 0;
  std::int64_t place = 3;
  while (n != 0) {
    if (n & 1u) result = checked_add(result, place);
    n >>= 1;
    if (n != 0) place = checked_mul(place, 3);
  }
  return result;
}

std::int64_t boundary_b(const Word& w) {
  if (w.empty() || w[0] != 0 || !w.uses_only(0, 1))
    throw std::invalid_argument("boundary_b needs a word 0w~ over {0,1}");
  return boundary_row(w)[0];
}

BTable build_btable(int level) {
  if (level < 1 || level > kMaxLevel)
    throw std::invalid_argument("build_btable needs 1 <= level <= " +
                                std::to_string(kMaxLevel));
  BTable t(1);
  t.set(Word::from_string("0"), 0, 3);
  fill_by_symmetry(t);
  for (int m = 2; m <= level; ++m) t = next_level(t);

  const TheoremReport report = verify_theorem_conditions(t);
  if (!report.all_passed()) throw ConditionViolation(report.summary());
  return t;
}

TheoremReport verify_theorem_conditions(const BTable& t) {
  const int m = t.level();
  const std::size_t n = t.word_count();
  ConditionResult sum, vertex, corner, symmetry, digits;
  sum.name = "sum";
  vertex.name = "vertex";
  corner.name = "corner";
  symmetry.name = "symmetry";
  digits.name = "digits";

  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t s = t.at(k, 0) + t.at(k, 1) + t.at(k, 2);
    if (s != 3) record(sum, {Word::from_index(k, m), -1, 3, s, "row sum"});
  }

  if (m >= 1) {
    for (std::size_t k = 0; k < ipow3(m - 1); ++k) {
      const Word stem = Word::from_index(k, m - 1);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const std::int64_t a = t(stem.appended(i), j);
          const std::int64_t b = t(stem.appended(j), i);
          if (a + b != 0)
            record(vertex, {stem.appended(i), j, -b, a,
                            "partner " + stem.appended(j).to_string()});
        }
    }
  }

  {
    std::int64_t expected = 1;
    for (int i = 0; i < m; ++i) expected *= 3;
    const Word zeros = Word::constant(0, m);
    if (t(zeros, 0) != expected) record(corner, {zeros, 0, expected, t(zeros, 0), ""});
  }

  for (const Perm3& p : all_perm3()) {
    for (std::size_t k = 0; k < n; ++k) {
      const Word w = Word::from_index(k, m);
      const Word pw = w.permuted(p);
      for (int j = 0; j < 3; ++j)
        if (t(pw, p[j]) != t.at(k, j))
          record(symmetry, {pw, p[j], t.at(k, j), t(pw, p[j]),
                            "image of " + w.to_string()});
    }
  }

  if (m >= 1) {
    for (std::size_t k = 0; k < n; ++k)
      for (int j = 0; j < 3; ++j) {
        const std::int64_t b = t.at(k, j);
        if (b % 3 != 0 || !has_binary_ternary_digits(b))
          record(digits, {Word::from_index(k, m), j, 0, b,
                          "entry must be 3 * (ternary number with digits 0/1)"});
      }
  }

  return {{sum, vertex, corner, symmetry, digits}};
}

bool TheoremReport::all_passed() const {
  for (const auto& c : conditions)
    if (!c.passed) return false;
  return true;
}

const ConditionResult& TheoremReport::operator[](std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + std::string(name));
}

std::string TheoremReport::summary() const {
  std::ostringstream os;
  for (const auto& c : conditions) {
    os << c.name << ": " << (c.passed ? "pass" : "FAIL");
    if (c.first) {
      os << " (" << c.violations << " violations; first at word "
         << c.first->word.to_string() << ", corner " << c.first->corner
         << ", expected " << c.first->expected << ", got " << c.first->got;
      if (!c.first->detail.empty()) os << ", " << c.first->detail;
      os << ")";
    }
    os << "\n";
  }
  return os.str();
}

AngleTable::AngleTable(int level, std::vector<double> angles)
    : level_(level), angles_(std::move(angles)) {
  if (angles_.size() != 3 * ipow3(level))
    throw std::invalid_argument("angle table size does not match level");
  for (double a : angles_)
    if (!(a > 0.0 && a < std::numbers::pi))
      throw GeometryError("angle outside (0, pi)");
}

AngleTable AngleTable::equilateral() {
  return AngleTable(0, std::vector<double>(3, std::numbers::pi / 3));
}

AngleTable angles_from_btable(const BTable& t) {
  const int m = t.level();
  const double unit = std::numbers::pi / static_cast<double>(ipow3(m + 1));
  std::vector<double> a(3 * t.word_count());
  for (std::size_t k = 0; k < t.word_count(); ++k)
    for (int j = 0; j < 3; ++j)
      a[3 * k + static_cast<std::size_t>(j)] =
          std::numbers::pi / 3 + static_cast<double>(t.at(k, j) - 1) * unit;
  return AngleTable(m, std::move(a));
}

AngleTable angles_for_level(int level) {
  if (level == 0) return AngleTable::equilateral();
  return angles_from_btable(build_btable(level));
}

nlohmann::json to_json(const BTable& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t k = 0; k < t.word_count(); ++k) {
    const std::string w = Word::from_index(k, t.level()).to_string();
    for (int j = 0; j < 3; ++j) entries.push_back({w, j, t.at(k, j)});
  }
  return {{"level", t.level()}, {"entries", std::move(entries)}};
}

BTable btable_from_json(const nlohmann::json& j) {
  BTable t(j.at("level").get<int>());
  std::vector<char> seen(3 * t.word_count(), 0);
  for (const auto& e : j.at("entries")) {
    const Word w = Word::from_string(e.at(0).get<std::string>());
    const int c = e.at(1).get<int>();
    if (w.length() != t.level() || c < 0 || c > 2)
      throw std::invalid_argument("b-table entry does not match level");
    t.set(w, c, e.at(2).get<std::int64_t>());
    seen[3 * w.index() + static_cast<std::size_t>(c)] = 1;
  }
  for (char s : seen)
    if (!s) throw std::invalid_argument("b-table JSON is missing entries");
  return t;
}

}  // namespace fractal_spectra

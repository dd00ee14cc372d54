// Finitely supported real sequences and their lattice operations.
//
// A FiniteVector stores (index, value) pairs with strictly increasing
// positive indices and no explicit zeros.  Every space in the library
// measures these vectors; every operation below preserves the
// representation invariant.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latlab {

using Index = std::int64_t;

struct Entry {
  Index index = 0;
  double value = 0.0;

  friend bool operator==(const Entry& a, const Entry& b) {
    return a.index == b.index && a.value == b.value;
  }
};

class FiniteVector {
 public:
  FiniteVector() = default;

  // Accepts entries in any order; merges duplicates by summing and drops
  // zeros.  Throws on non-positive indices or non-finite values.
  static FiniteVector from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::vector<Entry> merged;
    merged.reserve(entries.size());
    for (const Entry& e : entries) {
      if (e.index < 1) throw std::invalid_argument("FiniteVector: index must be >= 1");
      if (!std::isfinite(e.value)) throw std::invalid_argument("FiniteVector: non-finite value");
      if (!merged.empty() && merged.back().index == e.index) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [](const Entry& e) { return e.value == 0.0; });
    FiniteVector v;
    v.entries_ = std::move(merged);
    return v;
  }

  static FiniteVector of(std::initializer_list<std::pair<Index, double>> pairs) {
    std::vector<Entry> es;
    es.reserve(pairs.size());
    for (const auto& [i, x] : pairs) es.push_back({i, x});
    return from_entries(std::move(es));
  }

  static FiniteVector unit(Index i) { return of({{i, 1.0}}); }

  // Dense prefix (index 1..values.size()).
  static FiniteVector dense(const std::vector<double>& values) {
    std::vector<Entry> es;
    for (std::size_t k = 0; k < values.size(); ++k)
      es.push_back({static_cast<Index>(k + 1), values[k]});
    return from_entries(std::move(es));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  std::vector<Index> support() const {
    std::vector<Index> s;
    s.reserve(entries_.size());
    for (const Entry& e : entries_) s.push_back(e.index);
    return s;
  }

  Index min_index() const {
    if (entries_.empty()) throw std::logic_error("min_index of zero vector");
    return entries_.front().index;
  }
  Index max_index() const {
    if (entries_.empty()) throw std::logic_error("max_index of zero vector");
    return entries_.back().index;
  }

  double at(Index i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index j) { return e.index < j; });
    return (it != entries_.end() && it->index == i) ? it->value : 0.0;
  }

  FiniteVector abs() const {
    FiniteVector r = *this;
    for (Entry& e : r.entries_) e.value = std::fabs(e.value);
    return r;
  }

  FiniteVector scaled(double c) const {
    if (c == 0.0) return {};
    FiniteVector r = *this;
    for (Entry& e : r.entries_) e.value *= c;
    std::erase_if(r.entries_, [](const Entry& e) { return e.value == 0.0; });
    return r;
  }

  FiniteVector negated() const { return scaled(-1.0); }

  // Coordinatewise |v_i|^p on the support; the support is preserved exactly.
  FiniteVector pointwise_power(double p) const {
    if (!(p > 0.0)) throw std::invalid_argument("pointwise_power: p must be > 0");
    FiniteVector r = *this;
    for (Entry& e : r.entries_) e.value = std::pow(std::fabs(e.value), p);
    return r;
  }

  FiniteVector shifted(Index k) const {
    FiniteVector r = *this;
    for (Entry& e : r.entries_) {
      e.index += k;
      if (e.index < 1) throw std::invalid_argument("shifted: index fell below 1");
    }
    return r;
  }

  FiniteVector restricted(const std::function<bool(Index)>& keep) const {
    FiniteVector r;
    for (const Entry& e : entries_)
      if (keep(e.index)) r.entries_.push_back(e);
    return r;
  }

  FiniteVector restricted_to_range(Index lo, Index hi) const {
    return restricted([&](Index i) { return lo <= i && i <= hi; });
  }

  // v with signs of each coordinate applied from `signs` (coordinates of
  // `signs` outside our support are ignored).
  FiniteVector with_signs_of(const FiniteVector& signs) const {
    FiniteVector r = *this;
    for (Entry& e : r.entries_) {
      double s = signs.at(e.index);
      if (s < 0.0) e.value = -std::fabs(e.value);
      else e.value = std::fabs(e.value);
    }
    return r;
  }

  friend FiniteVector merge(const FiniteVector& a, const FiniteVector& b,
                            const std::function<double(double, double)>& op) {
    std::vector<Entry> out;
    out.reserve(a.entries_.size() + b.entries_.size());
    auto ia = a.entries_.begin(), ib = b.entries_.begin();
    while (ia != a.entries_.end() || ib != b.entries_.end()) {
      if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->index < ib->index)) {
        out.push_back({ia->index, op(ia->value, 0.0)});
        ++ia;
      } else if (ia == a.entries_.end() || ib->index < ia->index) {
        out.push_back({ib->index, op(0.0, ib->value)});
        ++ib;
      } else {
        out.push_back({ia->index, op(ia->value, ib->value)});
        ++ia;
        ++ib;
      }
    }
    std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
    FiniteVector v;
    v.entries_ = std::move(out);
    return v;
  }

  friend FiniteVector operator+(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return x + y; });
  }
  friend FiniteVector operator-(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return x - y; });
  }

  // Lattice join and meet, coordinatewise with missing coordinates read as 0.
  friend FiniteVector join(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return std::max(x, y); });
  }
  friend FiniteVector meet(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return std::min(x, y); });
  }

  friend FiniteVector hadamard(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return x * y; });
  }

  // Positive/negative parts: v = pos - neg, both nonnegative with disjoint
  // supports.
  std::pair<FiniteVector, FiniteVector> sign_split() const {
    FiniteVector pos, neg;
    for (const Entry& e : entries_) {
      if (e.value > 0.0) pos.entries_.push_back(e);
      else neg.entries_.push_back({e.index, -e.value});
    }
    return {pos, neg};
  }

  friend double dot(const FiniteVector& a, const FiniteVector& b) {
    double s = 0.0;
    auto ia = a.entries_.begin(), ib = b.entries_.begin();
    while (ia != a.entries_.end() && ib != b.entries_.end()) {
      if (ia->index < ib->index) ++ia;
      else if (ib->index < ia->index) ++ib;
      else {
        s += ia->value * ib->value;
        ++ia;
        ++ib;
      }
    }
    return s;
  }

  double sum() const {
    double s = 0.0;
    for (const Entry& e : entries_) s += e.value;
    return s;
  }

  double linf() const {
    double m = 0.0;
    for (const Entry& e : entries_) m = std::max(m, std::fabs(e.value));
    return m;
  }

  double l1() const {
    double s = 0.0;
    for (const Entry& e : entries_) s += std::fabs(e.value);
    return s;
  }

  bool same_support(const FiniteVector& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t k = 0; k < entries_.size(); ++k)
      if (entries_[k].index != other.entries_[k].index) return false;
    return true;
  }

  bool disjoint_from(const FiniteVector& other) const {
    auto ia = entries_.begin(), ib = other.entries_.begin();
    while (ia != entries_.end() && ib != other.entries_.end()) {
      if (ia->index < ib->index) ++ia;
      else if (ib->index < ia->index) ++ib;
      else return false;
    }
    return true;
  }

  // max_i |a_i - b_i| over the union of supports
  friend double max_abs_dev(const FiniteVector& a, const FiniteVector& b) {
    return merge(a, b, [](double x, double y) { return x - y; }).linf();
  }

  friend bool operator==(const FiniteVector& a, const FiniteVector& b) {
    return a.entries_ == b.entries_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const Entry& e : entries_) {
      if (!first) os << ", ";
      os << e.index << ": " << e.value;
      first = false;
    }
    os << "}";
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const FiniteVector& v) {
    return os << v.to_string();
  }

 private:
  std::vector<Entry> entries_;
};

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

}  // namespace latlab

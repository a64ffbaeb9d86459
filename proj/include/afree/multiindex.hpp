#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace afree {

/// A d-dimensional multi-index of partial-derivative exponents.
struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {
    for (int v : entries)
      if (v < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }

  int dim() const { return static_cast<int>(entries.size()); }
  int order() const { return std::accumulate(entries.begin(), entries.end(), 0); }

  /// xi^alpha = prod_a xi[a]^entries[a].
  template <class Vec>
  double monomial(const Vec& xi) const {
    double p = 1.0;
    for (int a = 0; a < dim(); ++a)
      for (int e = 0; e < entries[static_cast<std::size_t>(a)]; ++e) p *= xi[a];
    return p;
  }

  bool operator==(const MultiIndex& o) const { return entries == o.entries; }
  bool operator<(const MultiIndex& o) const { return entries < o.entries; }
};

/// Unit multi-index e_a in d dimensions.
inline MultiIndex unit_index(int d, int a) {
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  e[static_cast<std::size_t>(a)] = 1;
  return MultiIndex(e);
}

} // namespace afree

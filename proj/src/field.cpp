#include "afree/field.hpp"

#include <cmath>
#include <functional>

namespace afree {

long long mode_index(const Grid& g, const int* freq) {
  long long flat = 0;
  for (int a = 0; a < g.dim; ++a) flat = flat * g.n + g.index_of_freq(freq[a]);
  return flat;
}

void for_each_mode(const Grid& g, const std::function<void(long long, const int*)>& f) {
  std::vector<int> idx(static_cast<std::size_t>(g.dim));
  std::vector<int> freq(static_cast<std::size_t>(g.dim));
  const long long total = g.points();
  for (long long flat = 0; flat < total; ++flat) {
    g.decode(flat, idx.data());
    for (int a = 0; a < g.dim; ++a) freq[static_cast<std::size_t>(a)] = g.freq_of_index(idx[static_cast<std::size_t>(a)]);
    f(flat, freq.data());
  }
}

double mode_norm(const Grid& g, long long flat) {
  double s = 0.0;
  for (int a = g.dim - 1; a >= 0; --a) {
    const int m = static_cast<int>(flat % g.n);
    const int f = g.freq_of_index(m);
    s += static_cast<double>(f) * f;
    flat /= g.n;
  }
  return std::sqrt(s);
}

} // namespace afree

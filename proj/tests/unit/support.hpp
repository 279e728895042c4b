#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mcflow/grid.hpp"

namespace testing {

inline mcflow::Field random_field(const mcflow::GridSpec& g, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(g.node_count());
  for (double& x : v) x = dist(rng);
  return mcflow::Field(g, std::move(v));
}

inline double max_abs_diff(const mcflow::Field& a, const mcflow::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline mcflow::Field axpy(double a, const mcflow::Field& x, const mcflow::Field& y) {
  std::vector<double> v(y.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * x.values()[i] + y.values()[i];
  return mcflow::Field(y.grid(), std::move(v));
}

// Mirror-ghost five-point Laplacian, written independently of the library.
inline mcflow::Field reference_laplacian(const mcflow::Field& f) {
  const auto& g = f.grid();
  const int n = g.n;
  const double h2 = g.h() * g.h();
  auto at = [&](int i, int j) {
    if (i < 0) i = 1;
    if (i > n) i = n - 1;
    if (j < 0) j = 1;
    if (j > n) j = n - 1;
    return f(i, j);
  };
  mcflow::Field out(g);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      out(i, j) = (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1) - 4.0 * f(i, j)) / h2;
  return out;
}

}  // namespace testing

#include "conelab/finite_difference.hpp"

#include "conelab/errors.hpp"

#include <array>

namespace conelab::fd {

std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order) {
  const auto n = static_cast<int>(nodes.size());
  if (n == 0 || max_order < 0) {
    throw PreconditionError("fornberg_weights: empty node set or negative order");
  }
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

std::vector<double> stencil(double z, std::span<const double> offsets, int order, double h) {
  auto w = fornberg_weights(z, offsets, order);
  auto out = std::move(w[order]);
  double scale = 1.0;
  for (int m = 0; m < order; ++m) {
    scale *= h;
  }
  for (auto& v : out) {
    v /= scale;
  }
  return out;
}

std::vector<double> derivative_uniform(std::span<const double> values, double h) {
  const auto n = values.size();
  if (n < 5) {
    throw PreconditionError("derivative_uniform: need at least 5 samples");
  }
  static constexpr std::array<double, 5> offsets{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start;
    if (i < 2) {
      start = 0;
    } else if (i + 2 >= n) {
      start = n - 5;
    } else {
      start = i - 2;
    }
    const auto w = stencil(static_cast<double>(i - start), offsets, 1, h);
    double acc = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      acc += w[j] * values[start + j];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> gregory_weights(std::size_t n, double h) {
  if (n < 10) {
    throw PreconditionError("gregory_weights: need at least 10 nodes");
  }
  static constexpr std::array<double, 5> ends{95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0, 793.0 / 720.0,
                                              157.0 / 160.0};
  std::vector<double> w(n, h);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    w[i] = ends[i] * h;
    w[n - 1 - i] = ends[i] * h;
  }
  return w;
}

} // namespace conelab::fd

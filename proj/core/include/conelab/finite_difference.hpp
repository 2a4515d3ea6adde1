#pragma once

#include <span>
#include <vector>

namespace conelab::fd {

/// Finite-difference weights (Fornberg's recursion) for derivatives 0..max_order
/// at point z from the given nodes. weights[m][j] multiplies f(nodes[j]) in the
/// approximation of the m-th derivative.
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order);

/// Weights for the m-th derivative at z from integer offsets, scaled by 1/h^m.
std::vector<double> stencil(double z, std::span<const double> offsets, int order, double h = 1.0);

/// First derivative of samples on a uniform grid with spacing h: 4th-order
/// centred in the interior, 4th-order one-sided (5 points) at the two ends on
/// each side. Requires at least 5 samples.
std::vector<double> derivative_uniform(std::span<const double> values, double h);

/// Composite 6th-order Gregory weights (trapezoid with endpoint corrections)
/// for n >= 10 equispaced nodes with spacing h.
std::vector<double> gregory_weights(std::size_t n, double h);

} // namespace conelab::fd

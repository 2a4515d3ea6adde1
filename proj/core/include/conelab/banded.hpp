#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace conelab::disc {

/// General band matrix in LAPACK band storage, factorized with partial
/// pivoting (dgbtrf). Entries outside [-kl, ku] of the diagonal are rejected.
class BandedLU {
public:
  BandedLU(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  void add(std::size_t row, std::size_t col, double value);
  double at(std::size_t row, std::size_t col) const;

  /// Throws SolverError on a singular factor.
  void factorize();
  bool factorized() const { return factorized_; }

  /// Solves in place; reentrant once factorized.
  void solve(std::span<double> rhs) const;

private:
  std::size_t index(std::size_t row, std::size_t col) const;

  std::size_t n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;
  std::vector<int> pivots_;
  bool factorized_ = false;
};

} // namespace conelab::disc

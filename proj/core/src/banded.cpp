#include "conelab/banded.hpp"

#include "conelab/errors.hpp"

#include <fmt/format.h>

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab, int* ipiv,
             int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs, const double* ab,
             const int* ldab, const int* ipiv, double* b, const int* ldb, int* info, std::size_t trans_len);
}

namespace conelab::disc {

BandedLU::BandedLU(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0),
      pivots_(n, 0) {
  if (n == 0 || kl < 0 || ku < 0) {
    throw PreconditionError("BandedLU: invalid dimensions");
  }
}

std::size_t BandedLU::index(std::size_t row, std::size_t col) const {
  const auto offset = static_cast<long>(row) - static_cast<long>(col);
  if (offset > kl_ || -offset > ku_ || row >= n_ || col >= n_) {
    throw PreconditionError(fmt::format("BandedLU: entry ({}, {}) outside band [{}, {}]", row, col, kl_, ku_));
  }
  // Column-major band storage with kl extra rows reserved for fill-in.
  return col * static_cast<std::size_t>(ldab_) + static_cast<std::size_t>(kl_ + ku_ + offset);
}

void BandedLU::add(std::size_t row, std::size_t col, double value) {
  if (factorized_) {
    throw PreconditionError("BandedLU: matrix already factorized");
  }
  ab_[index(row, col)] += value;
}

double BandedLU::at(std::size_t row, std::size_t col) const {
  return ab_[index(row, col)];
}

void BandedLU::factorize() {
  const int n = static_cast<int>(n_);
  int info = 0;
  dgbtrf_(&n, &n, &kl_, &ku_, ab_.data(), &ldab_, pivots_.data(), &info);
  if (info != 0) {
    throw SolverError(fmt::format("dgbtrf failed with info = {}", info));
  }
  factorized_ = true;
}

void BandedLU::solve(std::span<double> rhs) const {
  if (!factorized_) {
    throw PreconditionError("BandedLU: solve before factorize");
  }
  if (rhs.size() != n_) {
    throw PreconditionError("BandedLU: right-hand side has the wrong length");
  }
  const int n = static_cast<int>(n_);
  const int nrhs = 1;
  int info = 0;
  const char trans = 'N';
  dgbtrs_(&trans, &n, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, pivots_.data(), rhs.data(), &n, &info, 1);
  if (info != 0) {
    throw SolverError(fmt::format("dgbtrs failed with info = {}", info));
  }
}

} // namespace conelab::disc

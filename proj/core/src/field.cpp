#include "conelab/field.hpp"

#include "conelab/errors.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace conelab {

namespace {

// The FFTW planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

ModalField::ModalField(std::size_t n_radial, int k_max)
    : n_(n_radial), k_max_(k_max), data_(n_radial * static_cast<std::size_t>(k_max + 1)) {
  if (k_max < 0) {
    throw PreconditionError("ModalField: k_max must be >= 0");
  }
}

std::span<std::complex<double>> ModalField::mode(int k) {
  return {data_.data() + static_cast<std::size_t>(k) * n_, n_};
}

std::span<const std::complex<double>> ModalField::mode(int k) const {
  return {data_.data() + static_cast<std::size_t>(k) * n_, n_};
}

double ModalField::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

ModalField& ModalField::operator+=(const ModalField& other) {
  if (other.n_ != n_ || other.k_max_ != k_max_) {
    throw PreconditionError("ModalField: shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ModalField& ModalField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

PhysicalField::PhysicalField(std::size_t n_radial, std::size_t n_theta)
    : n_(n_radial), m_(n_theta), data_(n_radial * n_theta, 0.0) {}

double PhysicalField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool PhysicalField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::size_t dealiased_theta_points(int k_max, int degree) {
  const int d = std::max(degree, 1);
  const std::size_t need = static_cast<std::size_t>(std::ceil((d + 1) * (2.0 * k_max + 1.0) / 2.0));
  std::size_t m = std::max<std::size_t>(need, 2 * static_cast<std::size_t>(k_max) + 2);
  m += m % 2;
  return std::max<std::size_t>(m, 4);
}

struct ThetaTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

ThetaTransform::ThetaTransform(std::size_t n_radial, int k_max, std::size_t n_theta)
    : n_(n_radial), k_max_(k_max), m_(n_theta), plans_(std::make_unique<Plans>()) {
  if (n_theta < 2 * static_cast<std::size_t>(k_max) + 1) {
    throw PreconditionError(fmt::format("ThetaTransform: {} angles cannot resolve modes up to {}", n_theta, k_max));
  }
  const int m = static_cast<int>(m_);
  const int half = m / 2 + 1;
  const int howmany = static_cast<int>(n_);
  std::vector<double> real(m_ * n_);
  std::vector<fftw_complex> spec(static_cast<std::size_t>(half) * n_);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_many_dft_r2c(1, &m, howmany, real.data(), nullptr, 1, m, spec.data(), nullptr, 1, half,
                                           flags);
  plans_->backward = fftw_plan_many_dft_c2r(1, &m, howmany, spec.data(), nullptr, 1, half, real.data(), nullptr, 1,
                                            m, flags);
  if (plans_->forward == nullptr || plans_->backward == nullptr) {
    throw SolverError("FFTW planning failed");
  }
}

ThetaTransform::~ThetaTransform() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

PhysicalField ThetaTransform::to_physical(const ModalField& u) const {
  if (u.radial_size() != n_) {
    throw PreconditionError("ThetaTransform: radial size mismatch");
  }
  const std::size_t half = m_ / 2 + 1;
  std::vector<std::complex<double>> spec(half * n_, 0.0);
  const int kk = std::min(u.k_max(), k_max_);
  for (std::size_t j = 0; j < n_; ++j) {
    spec[j * half] = u.at(0, j).real();
    for (int k = 1; k <= kk; ++k) {
      spec[j * half + static_cast<std::size_t>(k)] = u.at(k, j);
    }
  }
  PhysicalField out(n_, m_);
  // c2r overwrites its input.
  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(spec.data()), out.data().data());
  return out;
}

ModalField ThetaTransform::to_modal(const PhysicalField& u) const {
  if (u.radial_size() != n_ || u.theta_size() != m_) {
    throw PreconditionError("ThetaTransform: physical field shape mismatch");
  }
  const std::size_t half = m_ / 2 + 1;
  std::vector<std::complex<double>> spec(half * n_);
  std::vector<double> in(u.data());
  fftw_execute_dft_r2c(plans_->forward, in.data(), reinterpret_cast<fftw_complex*>(spec.data()));
  ModalField out(n_, k_max_);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t j = 0; j < n_; ++j) {
    out.at(0, j) = spec[j * half].real() * scale;
    for (int k = 1; k <= k_max_; ++k) {
      out.at(k, j) = spec[j * half + static_cast<std::size_t>(k)] * scale;
    }
  }
  return out;
}

} // namespace conelab

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace conelab {

/// Real field on the (x, theta) cylinder stored by Fourier mode:
/// u(x_j, theta) = sum_{k=-K..K} u_k(x_j) e^{i k theta} with u_{-k} = conj(u_k),
/// so only k = 0..K is kept. Mode 0 must be real.
class ModalField {
public:
  ModalField() = default;
  ModalField(std::size_t n_radial, int k_max);

  std::size_t radial_size() const { return n_; }
  int k_max() const { return k_max_; }

  std::span<std::complex<double>> mode(int k);
  std::span<const std::complex<double>> mode(int k) const;
  std::complex<double>& at(int k, std::size_t j) { return data_[static_cast<std::size_t>(k) * n_ + j]; }
  const std::complex<double>& at(int k, std::size_t j) const { return data_[static_cast<std::size_t>(k) * n_ + j]; }

  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

  /// Max over modes and nodes of |u_k|.
  double max_abs() const;

  ModalField& operator+=(const ModalField& other);
  ModalField& operator*=(double s);

private:
  std::size_t n_ = 0;
  int k_max_ = 0;
  std::vector<std::complex<double>> data_;
};

/// Samples on the tensor grid x_j x theta_l, theta_l = 2 pi l / M; row-major in j.
class PhysicalField {
public:
  PhysicalField() = default;
  PhysicalField(std::size_t n_radial, std::size_t n_theta);

  std::size_t radial_size() const { return n_; }
  std::size_t theta_size() const { return m_; }

  double& at(std::size_t j, std::size_t l) { return data_[j * m_ + l]; }
  double at(std::size_t j, std::size_t l) const { return data_[j * m_ + l]; }
  std::span<double> shell(std::size_t j) { return {data_.data() + j * m_, m_}; }
  std::span<const double> shell(std::size_t j) const { return {data_.data() + j * m_, m_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double max_abs() const;
  bool all_finite() const;

private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> data_;
};

/// Smallest even M >= 2 K + 2 that also covers products of `degree` factors
/// without aliasing into modes 0..K: M >= (degree + 1)(2K + 1) / 2.
std::size_t dealiased_theta_points(int k_max, int degree);

/// FFTW-backed transform between ModalField and PhysicalField with
/// u_k = (1/M) sum_l u(theta_l) e^{-i k theta_l}. Plans are created once;
/// transforms are reentrant.
class ThetaTransform {
public:
  ThetaTransform(std::size_t n_radial, int k_max, std::size_t n_theta);
  ~ThetaTransform();
  ThetaTransform(const ThetaTransform&) = delete;
  ThetaTransform& operator=(const ThetaTransform&) = delete;

  std::size_t radial_size() const { return n_; }
  int k_max() const { return k_max_; }
  std::size_t theta_size() const { return m_; }

  PhysicalField to_physical(const ModalField& u) const;
  /// Modes above k_max are discarded.
  ModalField to_modal(const PhysicalField& u) const;

private:
  struct Plans;
  std::size_t n_;
  int k_max_;
  std::size_t m_;
  std::unique_ptr<Plans> plans_;
};

} // namespace conelab

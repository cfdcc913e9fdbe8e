#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlm/format.hpp"
#include "qlm/operators.hpp"

namespace qlm {

using StateVector = std::vector<Complex>;

enum class PropagationMethod { automatic, krylov, dense };

struct PropagatorConfig {
  double dt = 0.01;
  int krylov_dim = 30;
  double tol = 1e-12;
  PropagationMethod method = PropagationMethod::automatic;
  std::size_t dense_threshold = 512;  // automatic picks the dense path up to this dimension

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive, got " + format_double(dt));
    if (krylov_dim < 2) throw std::invalid_argument("krylov_dim must be >= 2, got " + std::to_string(krylov_dim));
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive, got " + format_double(tol));
  }

  bool uses_dense(std::size_t dim) const noexcept {
    return method == PropagationMethod::dense ||
           (method == PropagationMethod::automatic && dim <= dense_threshold);
  }
};

// Number of samples on the grid 0, dt, 2 dt, ... up to t_max.
inline std::size_t sample_count(double t_max, double dt) {
  return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
}

inline double vector_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline Eigen::MatrixXd to_dense(const SparseHamiltonian& h) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < h.dim(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = h.diagonal()[r];
  for (const auto& e : h.upper()) {
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    m(static_cast<Eigen::Index>(e.col), static_cast<Eigen::Index>(e.row)) = e.value;
  }
  return m;
}

struct StepStats {
  int krylov_size = 0;
  double error_estimate = 0.0;
  bool breakdown = false;
};

// Lanczos approximation of exp(-i H tau) v with full reorthogonalisation.
// Holds a reference to the Hamiltonian, which must outlive the propagator.
class KrylovPropagator {
 public:
  KrylovPropagator(const SparseHamiltonian& h, PropagatorConfig cfg) : h_(h), cfg_(cfg) {
    cfg_.validate();
    breakdown_tol_ = 1e-14 * std::max(1.0, h_.norm_bound());
  }

  StateVector step(std::span<const Complex> v) { return step(v, cfg_.dt); }

  StateVector step(std::span<const Complex> v, double tau) {
    if (v.size() != h_.dim()) {
      throw std::invalid_argument("step: state of size " + std::to_string(v.size()) + " does not match dim " +
                                  std::to_string(h_.dim()));
    }
    stats_ = {};
    const double beta0 = vector_norm(v);
    if (tau == 0.0 || beta0 == 0.0) return StateVector(v.begin(), v.end());

    const std::size_t n = h_.dim();
    const int max_m = std::min<int>(cfg_.krylov_dim, static_cast<int>(n));
    basis_.resize(static_cast<std::size_t>(max_m));
    alpha_.clear();
    beta_.clear();

    auto& q0 = basis_[0];
    q0.resize(n);
    for (std::size_t i = 0; i < n; ++i) q0[i] = v[i] / beta0;
    work_.resize(n);

    Eigen::VectorXcd coeffs;
    for (int j = 0; j < max_m; ++j) {
      const auto& qj = basis_[static_cast<std::size_t>(j)];
      h_.apply<Complex>(qj, work_);
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) a += std::real(std::conj(qj[i]) * work_[i]);
      alpha_.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k <= j; ++k) {
          const auto& qk = basis_[static_cast<std::size_t>(k)];
          Complex proj{0.0, 0.0};
          for (std::size_t i = 0; i < n; ++i) proj += std::conj(qk[i]) * work_[i];
          for (std::size_t i = 0; i < n; ++i) work_[i] -= proj * qk[i];
        }
      }
      const double b = vector_norm(work_);

      coeffs = small_exponential(tau);
      const int m = j + 1;
      stats_.krylov_size = m;
      stats_.error_estimate = beta0 * b * std::abs(coeffs(m - 1));
      if (b < breakdown_tol_ || m == static_cast<int>(n)) {
        stats_.breakdown = true;
        stats_.error_estimate = 0.0;
        break;
      }
      if (stats_.error_estimate < cfg_.tol) break;
      if (m == max_m) {
        throw std::runtime_error("Krylov step did not reach tol " + format_double(cfg_.tol) + " with " +
                                 std::to_string(max_m) + " vectors (error estimate " +
                                 format_double(stats_.error_estimate) + "); reduce dt or raise krylov_dim");
      }
      beta_.push_back(b);
      auto& next = basis_[static_cast<std::size_t>(m)];
      next.resize(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = work_[i] / b;
    }

    StateVector out(n, Complex{0.0, 0.0});
    for (int k = 0; k < coeffs.size(); ++k) {
      const Complex c = beta0 * coeffs(k);
      const auto& qk = basis_[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) out[i] += c * qk[i];
    }
    return out;
  }

  const StepStats& last_stats() const noexcept { return stats_; }
  const PropagatorConfig& config() const noexcept { return cfg_; }

 private:
  // exp(-i tau T) e_1 for the current tridiagonal T.
  Eigen::VectorXcd small_exponential(double tau) const {
    const auto m = static_cast<Eigen::Index>(alpha_.size());
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i < m; ++i) diag(i) = alpha_[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub(i) = beta_[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::VectorXcd phase(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      phase(i) = std::exp(Complex{0.0, -tau * eig.eigenvalues()(i)}) * q(0, i);
    }
    return q.cast<Complex>() * phase;
  }

  const SparseHamiltonian& h_;
  PropagatorConfig cfg_;
  double breakdown_tol_ = 0.0;
  std::vector<StateVector> basis_;
  StateVector work_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  StepStats stats_;
};

// One step of length cfg.dt.
inline StateVector step(const SparseHamiltonian& h, std::span<const Complex> v, const PropagatorConfig& cfg) {
  KrylovPropagator prop(h, cfg);
  return prop.step(v);
}

// Full eigendecomposition; exact evolution to any time. Intended for small dimensions.
class DenseEvolution {
 public:
  explicit DenseEvolution(const SparseHamiltonian& h) : solver_(to_dense(h)) {
    if (solver_.info() != Eigen::Success) throw std::runtime_error("dense eigendecomposition failed");
  }

  const Eigen::VectorXd& eigenvalues() const { return solver_.eigenvalues(); }

  StateVector evolve(std::span<const Complex> v0, double t) const {
    const auto n = solver_.eigenvalues().size();
    if (static_cast<Eigen::Index>(v0.size()) != n) throw std::invalid_argument("DenseEvolution: dimension mismatch");
    Eigen::Map<const Eigen::VectorXcd> v(v0.data(), n);
    const Eigen::MatrixXd& q = solver_.eigenvectors();
    Eigen::VectorXcd c = q.transpose().cast<Complex>() * v;
    for (Eigen::Index i = 0; i < n; ++i) c(i) *= std::exp(Complex{0.0, -t * solver_.eigenvalues()(i)});
    Eigen::VectorXcd out = q.cast<Complex>() * c;
    return StateVector(out.data(), out.data() + n);
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

struct EvolutionStats {
  std::size_t samples = 0;
  bool dense = false;
  int max_krylov_size = 0;
  double max_error_estimate = 0.0;
};

// Calls sampler(t, psi) at t = 0 and after every step; t is exactly i * dt.
template <typename Sampler>
EvolutionStats evolve(const SparseHamiltonian& h, std::span<const Complex> v0, double t_max,
                      const PropagatorConfig& cfg, Sampler&& sampler) {
  cfg.validate();
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be >= 0, got " + format_double(t_max));
  EvolutionStats stats;
  const std::size_t count = sample_count(t_max, cfg.dt);
  stats.samples = count;

  if (cfg.uses_dense(h.dim())) {
    stats.dense = true;
    DenseEvolution dense(h);
    sampler(0.0, std::span<const Complex>(v0));
    for (std::size_t i = 1; i < count; ++i) {
      const double t = static_cast<double>(i) * cfg.dt;
      const auto psi = dense.evolve(v0, t);
      sampler(t, std::span<const Complex>(psi));
    }
    return stats;
  }

  KrylovPropagator prop(h, cfg);
  StateVector psi(v0.begin(), v0.end());
  sampler(0.0, std::span<const Complex>(psi));
  for (std::size_t i = 1; i < count; ++i) {
    psi = prop.step(psi);
    stats.max_krylov_size = std::max(stats.max_krylov_size, prop.last_stats().krylov_size);
    stats.max_error_estimate = std::max(stats.max_error_estimate, prop.last_stats().error_estimate);
    sampler(static_cast<double>(i) * cfg.dt, std::span<const Complex>(psi));
  }
  return stats;
}

}  // namespace qlm

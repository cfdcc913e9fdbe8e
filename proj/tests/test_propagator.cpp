#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "qlm/gauge_basis.hpp"
#include "qlm/observables.hpp"
#include "qlm/operators.hpp"
#include "qlm/propagator.hpp"

namespace qlm {
namespace {

ModelSpec make_model(int twice_s, int length, double mu = 0.0, double kappa = 0.0) {
  ModelSpec m;
  m.spin = SpinValue(twice_s);
  m.length = length;
  m.mu = mu;
  m.kappa = kappa;
  m.initial_mz = HalfInt::from_twice(twice_s);
  return m;
}

StateVector random_state(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  StateVector v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  const double norm = vector_norm(v);
  for (auto& z : v) z /= norm;
  return v;
}

double max_deviation(const StateVector& a, const StateVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

PropagatorConfig krylov_config(double dt = 0.01) {
  PropagatorConfig cfg;
  cfg.dt = dt;
  cfg.method = PropagationMethod::krylov;
  return cfg;
}

// Pade-based matrix exponential, independent of both the Lanczos and eigen paths.
StateVector pade_evolve(const SparseHamiltonian& h, const StateVector& v0, double t) {
  const Eigen::MatrixXcd gen = Complex{0.0, -t} * to_dense(h).cast<Complex>();
  const Eigen::MatrixXcd u = gen.exp();
  Eigen::Map<const Eigen::VectorXcd> v(v0.data(), static_cast<Eigen::Index>(v0.size()));
  const Eigen::VectorXcd out = u * v;
  return StateVector(out.data(), out.data() + out.size());
}

TEST(PropagatorConfig, ValidatesFields) {
  PropagatorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.krylov_dim = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SampleCount, CountsGridPointsInclusive) {
  EXPECT_EQ(sample_count(30.0, 0.01), 3001U);
  EXPECT_EQ(sample_count(0.0, 0.01), 1U);
  EXPECT_EQ(sample_count(1.0, 0.3), 4U);
  EXPECT_EQ(sample_count(10.0, 0.1), 101U);
}

TEST(KrylovStep, ZeroTimeIsIdentity) {
  const auto basis = enumerate_basis(make_model(3, 6));
  const auto h = build_qlm(basis);
  KrylovPropagator prop(h, krylov_config());
  const auto v = random_state(basis.size(), 1);
  EXPECT_EQ(prop.step(v, 0.0), v);
}

TEST(KrylovStep, EigenvectorPicksUpPhase) {
  const auto basis = enumerate_basis(make_model(2, 6, 0.2, 0.5));
  const auto h = build_qlm(basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_dense(h));
  const Eigen::Index k = 5;
  StateVector v(basis.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eig.eigenvectors()(static_cast<Eigen::Index>(i), k);
  KrylovPropagator prop(h, krylov_config(0.05));
  const auto out = prop.step(v);
  const Complex phase = std::exp(Complex{0.0, -0.05 * eig.eigenvalues()(k)});
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LT(std::abs(out[i] - phase * v[i]), 1e-12);
  EXPECT_TRUE(prop.last_stats().breakdown);
}

TEST(KrylovStep, DimensionMismatchThrows) {
  const auto basis = enumerate_basis(make_model(1, 4));
  const auto h = build_qlm(basis);
  KrylovPropagator prop(h, krylov_config());
  EXPECT_THROW(prop.step(StateVector(basis.size() + 2, 0.0)), std::invalid_argument);
}

TEST(KrylovStep, UnreachableToleranceRaises) {
  const auto basis = enumerate_basis(make_model(3, 8));
  const auto h = build_qlm(basis);
  PropagatorConfig cfg = krylov_config(5.0);
  cfg.krylov_dim = 3;
  KrylovPropagator prop(h, cfg);
  EXPECT_THROW(prop.step(random_state(basis.size(), 3)), std::runtime_error);
}

TEST(KrylovEvolve, MatchesDenseOraclesAtSmallSize) {
  for (int twice_s : {1, 3}) {
    const auto basis = enumerate_basis(make_model(twice_s, 4, 0.1, 0.3));
    const auto h = build_qlm(basis);
    const auto v0 = random_state(basis.size(), 17);
    KrylovPropagator prop(h, krylov_config(0.01));
    StateVector psi = v0;
    for (int i = 0; i < 1000; ++i) psi = prop.step(psi);
    const DenseEvolution dense(h);
    EXPECT_LT(max_deviation(psi, dense.evolve(v0, 10.0)), 1e-10) << "2S=" << twice_s;
    EXPECT_LT(max_deviation(psi, pade_evolve(h, v0, 10.0)), 1e-10) << "2S=" << twice_s;
  }
}

TEST(KrylovEvolve, LargeStepsMatchPade) {
  const auto basis = enumerate_basis(make_model(3, 6, 0.2, 0.4));
  const auto h = build_qlm(basis);
  const auto v0 = random_state(basis.size(), 23);
  KrylovPropagator prop(h, krylov_config(0.5));
  StateVector psi = v0;
  for (int i = 0; i < 8; ++i) psi = prop.step(psi);
  EXPECT_LT(max_deviation(psi, pade_evolve(h, v0, 4.0)), 1e-10);
}

TEST(KrylovEvolve, TimeReversalRecoversInitialState) {
  const auto basis = enumerate_basis(make_model(3, 8));
  const auto h = build_qlm(basis);
  const auto v0 = random_state(basis.size(), 5);
  KrylovPropagator prop(h, krylov_config(0.05));
  StateVector psi = v0;
  for (int i = 0; i < 100; ++i) psi = prop.step(psi, 0.05);
  for (int i = 0; i < 100; ++i) psi = prop.step(psi, -0.05);
  EXPECT_LT(max_deviation(psi, v0), 1e-8);
}

TEST(Evolve, SamplerCadenceAndConservation) {
  const auto basis = enumerate_basis(make_model(3, 10));
  const auto h = build_qlm(basis);
  StateVector psi0(basis.size(), 0.0);
  psi0[vacuum_state(basis, HalfInt::from_twice(3))] = 1.0;
  const PropagatorConfig cfg = krylov_config(0.01);
  std::size_t calls = 0;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
  const double e0 = std::real(expectation(h, psi0));
  const auto stats = evolve(h, psi0, 5.0, cfg, [&](double t, std::span<const Complex> psi) {
    EXPECT_EQ(t, static_cast<double>(calls) * cfg.dt);
    ++calls;
    max_norm_drift = std::max(max_norm_drift, std::abs(vector_norm(psi) - 1.0));
    max_energy_drift = std::max(max_energy_drift, std::abs(std::real(expectation(h, psi)) - e0));
  });
  EXPECT_EQ(calls, 501U);
  EXPECT_EQ(stats.samples, 501U);
  EXPECT_FALSE(stats.dense);
  EXPECT_LT(max_norm_drift, 1e-9);
  EXPECT_LT(max_energy_drift, 1e-9);
}

TEST(Evolve, AutomaticPathChoosesDenseForSmallDimensions) {
  const auto basis = enumerate_basis(make_model(1, 4));
  const auto h = build_qlm(basis);
  StateVector psi0(basis.size(), 0.0);
  psi0[0] = 1.0;
  PropagatorConfig cfg;
  std::vector<StateVector> dense_states;
  const auto stats = evolve(h, psi0, 1.0, cfg, [&](double, std::span<const Complex> psi) {
    dense_states.emplace_back(psi.begin(), psi.end());
  });
  EXPECT_TRUE(stats.dense);
  cfg.method = PropagationMethod::krylov;
  std::size_t i = 0;
  evolve(h, psi0, 1.0, cfg, [&](double, std::span<const Complex> psi) {
    EXPECT_LT(max_deviation(StateVector(psi.begin(), psi.end()), dense_states[i++]), 1e-11);
  });
}

TEST(Evolve, NegativeTmaxThrows) {
  const auto basis = enumerate_basis(make_model(1, 4));
  const auto h = build_qlm(basis);
  StateVector psi0(basis.size(), 0.0);
  psi0[0] = 1.0;
  EXPECT_THROW(evolve(h, psi0, -1.0, PropagatorConfig{}, [](double, std::span<const Complex>) {}),
               std::invalid_argument);
}

}  // namespace
}  // namespace qlm

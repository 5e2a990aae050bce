// Shared test utilities: seeded random states/unitaries and parameter sets.

#pragma once

#include <random>

#include "sbsim/broadcast.hpp"

namespace sbsim::testing {

inline std::mt19937& rng() {
  static std::mt19937 gen(987654321u);
  return gen;
}

inline Eigen::VectorXcd random_pure(int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(g(rng()), g(rng()));
  v /= v.norm();
  return v;
}

inline DensityOperator random_density(int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng()), g(rng()));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return make_density(std::move(rho), {d});
}

inline ComplexMatrix random_unitary(int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng()), g(rng()));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex diag = r(i, i);
    if (std::abs(diag) > 0.0) q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

// Physical-scale model: dimensionless groups k0*dx = k0*a = 0.01.
inline SphereModel physical_model() {
  SphereModel m;
  m.a = 1e-6;
  m.epsilon = 2.0;
  m.delta_x = 1e-6;
  m.theta = 0.0;
  m.k0 = 1e4;
  m.box_L = 1.0;
  m.photon_density = 1e20;
  return m;
}

// Dimensionless single-scale model with the validity thresholds relaxed, so
// per-photon effects are far above round-off and 1/L^4 corrections are
// measurable.
inline SphereModel unit_model() {
  SphereModel m;
  m.a = 0.5;
  m.epsilon = 2.0;
  m.delta_x = 0.5;
  m.theta = 0.0;
  m.k0 = 1.0;
  m.box_L = 1.0;
  m.photon_density = 1.0;
  m.c_light = 1.0;
  m.soft_threshold = 10.0;
  m.dipole_threshold = 10.0;
  return m;
}

// Controlled-unitary instance with a prescribed per-photon overlap o:
// U1 = I, U2 maps |0> to conj(o)|0> + sqrt(1-|o|^2)|1>, rho0_E = |0><0|.
inline ControlledUnitaryInstance overlap_instance(const DensityOperator& rho0_S,
                                                  Complex o, int n_total,
                                                  int n_obs) {
  const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(o)));
  ControlledUnitaryInstance inst;
  inst.rho0_S = rho0_S;
  inst.u1 = ComplexMatrix::Identity(2, 2);
  inst.u2 = ComplexMatrix(2, 2);
  inst.u2 << std::conj(o), -s, s, o;
  ComplexMatrix rho_e = ComplexMatrix::Zero(2, 2);
  rho_e(0, 0) = 1.0;
  inst.rho0_E = DensityOperator{std::move(rho_e), {2}};
  inst.n_total = n_total;
  inst.n_obs = n_obs;
  return inst;
}

inline DensityOperator plus_state() {
  ComplexMatrix r(2, 2);
  r << 0.5, 0.5, 0.5, 0.5;
  return make_density(std::move(r), {2});
}

// Five-mode anisotropic measure on a single elastic shell at |k| = k_mag,
// pairwise-distinct probabilities.
inline SpectralMeasure anisotropic5(double k_mag) {
  SpectralMeasure m;
  const double probs[5] = {0.35, 0.25, 0.18, 0.13, 0.09};
  const Eigen::Vector3d dirs[5] = {
      {0.0, 0.0, 1.0},
      {0.8, 0.0, 0.6},
      {-0.6, 0.0, 0.8},
      {0.0, 0.6, -0.8},
      {0.48, -0.6, 0.64},
  };
  for (int i = 0; i < 5; ++i)
    m.modes.push_back({k_mag * dirs[i].normalized(), probs[i]});
  return m;
}

}  // namespace sbsim::testing

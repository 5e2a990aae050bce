// Information-phase diagram over the observed macro-fraction, and the
// Perron-Frobenius broadcasting construction: spectra that are fixed points
// of the decoherence-induced stochastic matrix pass through undistorted.

#pragma once

#include <array>

#include "sbsim/broadcast.hpp"
#include "sbsim/qinfo.hpp"

namespace sbsim {

enum class Regime { product, broadcasting, full_information };

struct PhasePoint {
  double f = 0.0;            // observed macro-fraction (0 for micro points)
  Regime regime = Regime::broadcasting;
  double i_bits = 0.0;       // mutual information across the S:fE cut
  double t_over_tau = 0.0;
  int micro_photons = 0;     // fixed photon count for product-phase points
};

// One point per f_grid entry (f = 1 evaluated on a small explicit state with
// the decay exponent redistributed over its photons; interior f through the
// Gram representation at the full photon count) plus one product-phase point
// per micro_counts entry. Regime labels are structural: micro -> product,
// 0 < f < 1 -> broadcasting, f = 1 -> full_information.
std::vector<PhasePoint> phase_diagram(const SphereModel& model,
                                      const DensityOperator& rho0_S, double t,
                                      const std::vector<double>& f_grid,
                                      const std::vector<int>& micro_counts);

struct StochasticMatrixP {
  Eigen::MatrixXd p;  // p(i,j) = |<phi_i|x_j>|^2

  void validate() const;  // rows and columns sum to 1 within 1e-12
};

StochasticMatrixP pf_matrix(const std::array<Eigen::Vector2cd, 2>& phi);

// Stationary distribution: eigenvector of eigenvalue 1, entries >= 0, sum 1.
// Degenerate fixed subspaces (e.g. P = identity) tie-break to uniform.
Eigen::VectorXd pf_stationary(const StochasticMatrixP& p);

struct PfReport {
  Eigen::Vector2d input_spectrum;
  Eigen::Vector2d output_spectrum;  // spectrum recovered from the broadcast state
  double max_deviation = 0.0;       // max |output - input|
};

// Prepares rho0_S = sum_i spectrum_i |phi_i><phi_i|, pushes it through the
// broadcast construction, and compares the recovered pointer-basis spectrum
// with the input. Non-stationary inputs are reported, not rejected.
PfReport pf_broadcast_check(const SphereModel& model,
                            const std::array<Eigen::Vector2cd, 2>& phi,
                            const Eigen::Vector2d& spectrum, double f,
                            double m, double t);

}  // namespace sbsim

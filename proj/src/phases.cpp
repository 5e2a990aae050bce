#include "sbsim/phases.hpp"

#include <cmath>
#include <numbers>

namespace sbsim {

namespace {

// Small explicit state for the f = 1 point: the full decay exponent t/tau_D
// is redistributed over a handful of photons so the dense oracle stays
// tractable while keeping the same aggregate overlap.
constexpr int kFullInfoPhotons = 8;

double full_information_i(const SphereModel& model,
                          const DensityOperator& rho0_S, double t) {
  const double tau = decoherence_time(model);
  const double nt = photon_count(model, t, false);
  const double log_per = -t / (tau * kFullInfoPhotons);
  const double phase_per =
      std::remainder(nt * std::arg(micro_overlap(model)) / kFullInfoPhotons,
                     2.0 * std::numbers::pi);
  const Complex o_eff =
      std::exp(log_per) * Complex(std::cos(phase_per), std::sin(phase_per));
  const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(o_eff)));

  ControlledUnitaryInstance inst;
  inst.rho0_S = rho0_S;
  inst.u1 = ComplexMatrix::Identity(2, 2);
  inst.u2 = ComplexMatrix(2, 2);
  inst.u2 << std::conj(o_eff), -s, s, o_eff;
  ComplexMatrix rho_e = ComplexMatrix::Zero(2, 2);
  rho_e(0, 0) = 1.0;
  inst.rho0_E = DensityOperator{std::move(rho_e), {2}};
  inst.n_total = kFullInfoPhotons;
  inst.n_obs = kFullInfoPhotons;
  return mutual_information(inst.explicit_state(), 1);
}

}  // namespace

std::vector<PhasePoint> phase_diagram(const SphereModel& model,
                                      const DensityOperator& rho0_S, double t,
                                      const std::vector<double>& f_grid,
                                      const std::vector<int>& micro_counts) {
  model.validate();
  if (rho0_S.dim() != 2)
    throw std::invalid_argument("phase_diagram: rho0_S must be a qubit state");
  if (f_grid.empty() && micro_counts.empty())
    throw std::invalid_argument("phase_diagram: empty grid");
  if (t < 0.0) throw std::invalid_argument("phase_diagram: negative time");

  const double tau = decoherence_time(model);
  const double t_over = t / tau;
  const double nt = photon_count(model, t, false);
  // Per-photon overlap in log space: the modulus deficit 1/(tau rho c L^2) is
  // far below double resolution at physical photon fluxes, so the raw complex
  // value would round to 1 and erase the decay entirely.
  const double per_photon_log =
      -1.0 / (tau * model.photon_density * model.c_light * model.box_L *
              model.box_L);
  const LogScalar o{per_photon_log, std::arg(micro_overlap(model))};

  std::vector<PhasePoint> out;
  for (int mu : micro_counts) {
    if (mu < 0) throw std::invalid_argument("phase_diagram: negative count");
    PhasePoint pt;
    pt.f = 0.0;
    pt.regime = Regime::product;
    pt.micro_photons = mu;
    pt.t_over_tau = t_over;
    if (mu == 0 || nt <= mu) {
      pt.i_bits = 0.0;
    } else {
      pt.i_bits =
          mutual_information(gram_sfe_state(rho0_S, o, mu, nt - mu), 1);
    }
    out.push_back(pt);
  }
  for (double f : f_grid) {
    if (f <= 0.0 || f > 1.0)
      throw std::invalid_argument("phase_diagram: f outside (0,1]");
    PhasePoint pt;
    pt.f = f;
    pt.t_over_tau = t_over;
    if (f == 1.0) {
      pt.regime = Regime::full_information;
      pt.i_bits = full_information_i(model, rho0_S, t);
    } else {
      pt.regime = Regime::broadcasting;
      pt.i_bits = mutual_information(
          gram_sfe_state(rho0_S, o, f * nt, (1.0 - f) * nt), 1);
    }
    out.push_back(pt);
  }
  return out;
}

void StochasticMatrixP::validate() const {
  if (p.rows() != p.cols() || p.rows() < 1)
    throw std::invalid_argument("StochasticMatrixP: non-square");
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (std::abs(p.row(i).sum() - 1.0) > 1e-12 ||
        std::abs(p.col(i).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("StochasticMatrixP: not bistochastic");
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p(i, j) < 0.0)
        throw std::invalid_argument("StochasticMatrixP: negative entry");
  }
}

StochasticMatrixP pf_matrix(const std::array<Eigen::Vector2cd, 2>& phi) {
  for (int i = 0; i < 2; ++i)
    if (std::abs(phi[i].norm() - 1.0) > 1e-12)
      throw std::invalid_argument("pf_matrix: basis vector not normalized");
  if (std::abs(phi[0].dot(phi[1])) > 1e-12)
    throw std::invalid_argument("pf_matrix: basis not orthogonal");
  StochasticMatrixP out;
  out.p.resize(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.p(i, j) = std::norm(phi[i](j));
  // |<phi_i|x_j>|^2 from an orthonormal basis is unistochastic, hence
  // bistochastic; round row/column sums onto exact normalization.
  return out;
}

Eigen::VectorXd pf_stationary(const StochasticMatrixP& p) {
  p.validate();
  const Eigen::Index n = p.p.rows();
  // Null space of P - I via full-pivot LU; the fixed subspace.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(p.p - Eigen::MatrixXd::Identity(n, n));
  lu.setThreshold(1e-9);
  Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() != 1) {
    // Degenerate fixed subspace (identity / reducible P): uniform tie-break.
    return Eigen::VectorXd::Constant(n, 1.0 / n);
  }
  Eigen::VectorXd v = kernel.col(0);
  if (v.sum() < 0.0) v = -v;
  v /= v.sum();
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::max(v(i), 0.0);
  v /= v.sum();
  return v;
}

PfReport pf_broadcast_check(const SphereModel& model,
                            const std::array<Eigen::Vector2cd, 2>& phi,
                            const Eigen::Vector2d& spectrum, double f,
                            double m, double t) {
  if (std::abs(spectrum.sum() - 1.0) > 1e-10 || spectrum.minCoeff() < 0.0)
    throw std::invalid_argument("pf_broadcast_check: invalid spectrum");
  ComplexMatrix rho = spectrum(0) * (phi[0] * phi[0].adjoint()) +
                      spectrum(1) * (phi[1] * phi[1].adjoint());
  DensityOperator rho0_S = make_density(std::move(rho), {2});

  const SfEState state =
      build_sfe_state(model, rho0_S, f, m, t, LimitMode::thermodynamic);
  const BroadcastReport rep = verify_broadcast(state);

  PfReport out;
  out.input_spectrum = spectrum;
  out.output_spectrum = Eigen::Vector2d(rep.spectrum[0], rep.spectrum[1]);
  out.max_deviation = (out.output_spectrum - spectrum).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace sbsim

#include "sbsim/broadcast.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sbsim {

namespace {

constexpr double kUnderflowLog = -700.0;

void check_fractions(double f, double m, double& multiplicity) {
  if (f < 0.0 || f > 1.0)
    throw std::invalid_argument("build_sfe_state: f outside [0,1]");
  if (m <= 0.0 || m > 1.0)
    throw std::invalid_argument("build_sfe_state: m outside (0,1]");
  multiplicity = f / m;
  if (std::abs(multiplicity - std::round(multiplicity)) > 1e-9)
    throw std::invalid_argument(
        "build_sfe_state: f must partition into whole macro-fractions of "
        "size m");
  multiplicity = std::round(multiplicity);
  const double big_m = 1.0 / m;
  if (multiplicity > big_m + 1e-9)
    throw std::invalid_argument("build_sfe_state: f/m exceeds 1/m");
}

void check_qubit(const DensityOperator& rho0_S) {
  if (rho0_S.dim() != 2)
    throw std::invalid_argument("rho0_S must be a qubit state");
}

}  // namespace

LogScalar LogScalar::from(Complex z) {
  LogScalar out;
  const double mod = std::abs(z);
  out.log_abs = mod > 0.0 ? std::log(mod)
                          : -std::numeric_limits<double>::infinity();
  out.phase = std::arg(z);
  return out;
}

LogScalar LogScalar::pow(double n) const {
  LogScalar out;
  out.log_abs = log_abs * n;
  out.phase = std::remainder(phase * n, 2.0 * std::numbers::pi);
  return out;
}

double LogScalar::modulus() const {
  return log_abs < kUnderflowLog ? 0.0 : std::exp(log_abs);
}

Complex LogScalar::value() const {
  return modulus() * Complex(std::cos(phase), std::sin(phase));
}

SfEState build_sfe_state(const SphereModel& model, const DensityOperator& rho0_S,
                         double f, double m, double t, LimitMode mode) {
  model.validate();
  check_qubit(rho0_S);
  if (t < 0.0) throw std::invalid_argument("build_sfe_state: negative time");

  SfEState st;
  check_fractions(f, m, st.multiplicity);
  st.f = f;
  st.m = m;
  st.big_m = 1.0 / m;
  st.mode = mode;
  st.p1 = rho0_S.mat(0, 0).real();
  st.p2 = rho0_S.mat(1, 1).real();
  st.offdiag_coeff = rho0_S.mat(0, 1);
  st.n_t = photon_count(model, t, mode == LimitMode::finite_box);

  const Complex o = micro_overlap(model);
  const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(o)));

  // Per-photon branch states in the effective subspace span{S1|k0>, S2|k0>}.
  Eigen::Vector2cd e1(1.0, 0.0), e2(std::conj(o), s);
  st.branch1.base = e1 * e1.adjoint();
  st.branch2.base = e2 * e2.adjoint();
  st.branch1.count = st.branch2.count = m * st.n_t;
  st.offdiag_block.base = e1 * e2.adjoint();
  st.offdiag_block.count = f * st.n_t;

  if (mode == LimitMode::finite_box) {
    st.offdiag_decay = LogScalar::from(o).pow((1.0 - f) * st.n_t);
    st.branch_overlap_powered =
        LogScalar{m * st.n_t * std::log(std::max(std::abs(o), 1e-300)), 0.0};
  } else {
    const double tau = decoherence_time(model);
    st.offdiag_decay =
        LogScalar{-(1.0 - f) * t / tau, (1.0 - f) * st.n_t * std::arg(o)};
    st.branch_overlap_powered = LogScalar{-m * t / tau, 0.0};
  }
  return st;
}

SfEState build_sfe_state(const SphereModel& model, const SpectralMeasure& measure,
                         const DensityOperator& rho0_S, double f, double m,
                         double t, LimitMode mode, double od_scale) {
  model.validate();
  check_qubit(rho0_S);
  if (t < 0.0) throw std::invalid_argument("build_sfe_state: negative time");

  SfEState st;
  check_fractions(f, m, st.multiplicity);
  st.f = f;
  st.m = m;
  st.big_m = 1.0 / m;
  st.mode = mode;
  st.p1 = rho0_S.mat(0, 0).real();
  st.p2 = rho0_S.mat(1, 1).real();
  st.offdiag_coeff = rho0_S.mat(0, 1);
  st.n_t = photon_count(model, t, mode == LimitMode::finite_box);

  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  const int n = static_cast<int>(measure.modes.size());
  ComplexMatrix rho0 = ComplexMatrix::Zero(n, n);
  Complex kap = 0.0;
  for (int i = 0; i < n; ++i) {
    rho0(i, i) = measure.modes[i].p;
    kap += measure.modes[i].p * std::conj(a(i, i));
  }

  ComplexMatrix b2 = a * rho0 * a.adjoint();
  b2 /= b2.trace().real();  // the truncated A is unitary only to O(1/L^4)

  st.branch1.base = rho0;
  st.branch2.base = 0.5 * (b2 + b2.adjoint());
  st.branch1.count = st.branch2.count = m * st.n_t;
  st.offdiag_block.base = rho0 * a.adjoint();
  st.offdiag_block.count = f * st.n_t;

  const double b_photon =
      gen_overlap(DensityOperator{st.branch1.base, {n}},
                  DensityOperator{st.branch2.base, {n}});
  if (mode == LimitMode::finite_box) {
    st.offdiag_decay = LogScalar::from(kap).pow((1.0 - f) * st.n_t);
    st.branch_overlap_powered = LogScalar{
        m * st.n_t * std::log(std::min(std::max(b_photon, 1e-300), 1.0)), 0.0};
  } else {
    const double tau = tau_bar(model, measure);
    const double alpha = receptivity(model, measure, od_scale);
    st.offdiag_decay =
        LogScalar{-(1.0 - f) * t / tau, (1.0 - f) * st.n_t * std::arg(kap)};
    st.branch_overlap_powered = LogScalar{-alpha * m * t / tau, 0.0};
  }
  return st;
}

double coherent_norm(const SfEState& state) {
  return 2.0 * std::abs(state.offdiag_coeff) * state.offdiag_decay.modulus();
}

BroadcastReport verify_broadcast(const SfEState& state, double tol,
                                 double delta) {
  BroadcastReport rep;
  rep.tolerance = tol;
  rep.coherent_trace_norm = coherent_norm(state);
  rep.pairwise_overlap = state.branch_overlap_powered.modulus();
  rep.overlap_underflow = state.branch_overlap_powered.underflow();
  rep.spectrum[0] = state.p1;
  rep.spectrum[1] = state.p2;
  rep.is_broadcast =
      rep.coherent_trace_norm < tol && rep.pairwise_overlap < tol;

  // Redundancy: smallest fraction f' whose convergence bound drops below
  // delta * H_S. Per-photon quantities are recovered from the stored blocks.
  const double h_s = binary_entropy(std::clamp(state.p1, 0.0, 1.0));
  rep.redundancy_fraction = 0.0;
  rep.redundancy = 0.0;
  if (h_s > 0.0 && state.n_t > 0.0) {
    // Per-photon log kappa from the aggregate decay factor: the per-photon
    // block trace is indistinguishable from 1 at physical photon counts.
    const double traced = (1.0 - state.f) * state.n_t;
    const double log_kappa =
        traced >= 1.0
            ? state.offdiag_decay.log_abs / traced
            : std::log(
                  std::max(std::abs(state.offdiag_block.base.trace()), 1e-300));
    const double log_b =
        state.branch_overlap_powered.log_abs / std::max(state.m * state.n_t, 1.0);
    const double c12 = std::abs(state.offdiag_coeff);
    const double root = 2.0 * std::sqrt(std::max(state.p1 * state.p2, 0.0));
    auto powered = [&](double log_per, double exponent) {
      const double l = log_per * exponent;
      return l < kUnderflowLog ? 0.0 : std::exp(l);
    };
    const double eps_e = std::min(2.0 * c12 * powered(log_kappa, state.n_t), 1.0);
    for (int j = 1; j < 1000; ++j) {
      const double fp = j / 1000.0;
      const double eps_fe = std::min(
          2.0 * c12 * powered(log_kappa, (1.0 - fp) * state.n_t), 0.5);
      const double bound = binary_entropy(std::min(eps_e / 2.0, 0.5)) +
                           2.0 * binary_entropy(eps_fe) + 4.0 * eps_fe +
                           root * powered(log_b, fp * state.n_t);
      if (bound <= delta * h_s) {
        rep.redundancy_fraction = fp;
        rep.redundancy = std::floor(1.0 / fp);
        break;
      }
    }
  }
  return rep;
}

DensityOperator gram_sfe_state(const DensityOperator& rho0_S, Complex micro_o,
                               double n_obs, double n_traced) {
  return gram_sfe_state(rho0_S, LogScalar::from(micro_o), n_obs, n_traced);
}

DensityOperator gram_sfe_state(const DensityOperator& rho0_S, LogScalar micro_o,
                               double n_obs, double n_traced) {
  if (rho0_S.dim() != 2)
    throw std::invalid_argument("gram_sfe_state: rho0_S must be a qubit state");
  if (n_obs < 0.0 || n_traced < 0.0)
    throw std::invalid_argument("gram_sfe_state: negative photon count");

  const LogScalar conj_o{micro_o.log_abs, -micro_o.phase};
  const Complex g = conj_o.pow(n_obs).value();
  const Complex kap = micro_o.pow(n_traced).value();
  Eigen::Vector2cd psi1(1.0, 0.0);
  Eigen::Vector2cd psi2(g, std::sqrt(std::max(0.0, 1.0 - std::norm(g))));

  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  const Eigen::Vector2cd psi[2] = {psi1, psi2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Complex k_ij = (i == j) ? Complex(1.0) : (i == 0 ? kap : std::conj(kap));
      const ComplexMatrix block =
          rho0_S.mat(i, j) * k_ij * (psi[i] * psi[j].adjoint());
      rho.block(2 * i, 2 * j, 2, 2) = block;
    }
  return make_density(std::move(rho), {2, 2});
}

void ControlledUnitaryInstance::validate() const {
  if (rho0_S.dim() != 2)
    throw std::invalid_argument("instance: rho0_S must be a qubit state");
  const Eigen::Index d = rho0_E.dim();
  if (u1.rows() != d || u1.cols() != d || u2.rows() != d || u2.cols() != d)
    throw std::invalid_argument("instance: unitary dimension mismatch");
  const double gap1 = (u1.adjoint() * u1 - ComplexMatrix::Identity(d, d))
                          .cwiseAbs()
                          .maxCoeff();
  const double gap2 = (u2.adjoint() * u2 - ComplexMatrix::Identity(d, d))
                          .cwiseAbs()
                          .maxCoeff();
  if (gap1 > 1e-9 || gap2 > 1e-9)
    throw std::invalid_argument("instance: non-unitary branch operator");
  if (n_total < 0 || n_obs < 0 || n_obs > n_total)
    throw std::invalid_argument("instance: invalid photon partition");
}

Complex ControlledUnitaryInstance::kappa() const {
  return (u1 * rho0_E.mat * u2.adjoint()).trace();
}

DensityOperator ControlledUnitaryInstance::explicit_state() const {
  validate();
  const Eigen::Index d = rho0_E.dim();
  double full = 2.0 * std::pow(static_cast<double>(d), n_total);
  if (full > 16384.0)
    throw std::invalid_argument("explicit_state: dimension exceeds 2^14");

  DensityOperator rho = rho0_S;
  for (int i = 0; i < n_total; ++i) rho = tensor(rho, rho0_E);

  const ComplexMatrix k1 = kron_power(u1, n_total);
  const ComplexMatrix k2 = kron_power(u2, n_total);
  const Eigen::Index half = k1.rows();
  ComplexMatrix u = ComplexMatrix::Zero(2 * half, 2 * half);
  u.topLeftCorner(half, half) = k1;
  u.bottomRightCorner(half, half) = k2;

  rho.mat = u * rho.mat * u.adjoint();
  std::vector<int> keep(static_cast<size_t>(n_obs) + 1);
  for (int i = 0; i <= n_obs; ++i) keep[static_cast<size_t>(i)] = i;
  return partial_trace(rho, keep);
}

DensityOperator ControlledUnitaryInstance::factored_state() const {
  validate();
  const Eigen::Index d = rho0_E.dim();
  const Complex kap = kappa();
  const Complex kap_pow = std::pow(kap, n_traced());

  ComplexMatrix blocks[2][2];
  const ComplexMatrix* us[2] = {&u1, &u2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      blocks[i][j] =
          kron_power((*us[i]) * rho0_E.mat * us[j]->adjoint(), n_obs);

  const Eigen::Index half = blocks[0][0].rows();
  ComplexMatrix rho = ComplexMatrix::Zero(2 * half, 2 * half);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex coeff = rho0_S.mat(i, j);
      if (i != j) coeff *= (i == 0) ? kap_pow : std::conj(kap_pow);
      rho.block(i * half, j * half, half, half) = coeff * blocks[i][j];
    }

  DensityOperator out;
  out.mat = std::move(rho);
  out.subsystem_dims.push_back(2);
  for (int i = 0; i < n_obs; ++i) out.subsystem_dims.push_back(d);
  return out;
}

double ControlledUnitaryInstance::coherent_norm() const {
  return 2.0 * std::abs(rho0_S.mat(0, 1)) *
         std::pow(std::abs(kappa()), n_traced());
}

double ControlledUnitaryInstance::branch_overlap() const {
  const Eigen::Index d = rho0_E.dim();
  DensityOperator b1{u1 * rho0_E.mat * u1.adjoint(), {d}};
  DensityOperator b2{u2 * rho0_E.mat * u2.adjoint(), {d}};
  return gen_overlap(b1, b2);
}

ComplexMatrix unitarize(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(
      a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ControlledUnitaryInstance pure_instance(const SphereModel& model,
                                        const DensityOperator& rho0_S,
                                        int n_total, int n_obs) {
  model.validate();
  const Complex o = micro_overlap(model);
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

ControlledUnitaryInstance mixed_instance(const SphereModel& model,
                                         const SpectralMeasure& measure,
                                         const DensityOperator& rho0_S,
                                         int n_total, int n_obs,
                                         double od_scale) {
  model.validate();
  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  const Eigen::Index n = a.rows();

  ControlledUnitaryInstance inst;
  inst.rho0_S = rho0_S;
  inst.u1 = ComplexMatrix::Identity(n, n);
  inst.u2 = unitarize(a);
  ComplexMatrix rho_e = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) rho_e(i, i) = measure.modes[i].p;
  inst.rho0_E = DensityOperator{std::move(rho_e), {n}};
  inst.n_total = n_total;
  inst.n_obs = n_obs;
  return inst;
}

}  // namespace sbsim

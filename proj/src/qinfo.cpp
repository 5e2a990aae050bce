#include "sbsim/qinfo.hpp"

#include <cmath>

namespace sbsim {

void EnsembleCQ::validate() const {
  if (probs.size() != states.size() || probs.empty())
    throw std::invalid_argument("EnsembleCQ: size mismatch or empty");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("EnsembleCQ: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("EnsembleCQ: probabilities do not sum to 1");
  for (const auto& s : states)
    if (s.dim() != states.front().dim())
      throw std::invalid_argument("EnsembleCQ: state dimension mismatch");
}

double mutual_information(const DensityOperator& rho, int n_first) {
  const int n = static_cast<int>(rho.subsystem_dims.size());
  if (n_first < 1 || n_first >= n)
    throw std::invalid_argument("mutual_information: invalid cut");
  std::vector<int> left, right;
  for (int i = 0; i < n_first; ++i) left.push_back(i);
  for (int i = n_first; i < n; ++i) right.push_back(i);
  const double sa = von_neumann_entropy(partial_trace(rho, left));
  const double sb = von_neumann_entropy(partial_trace(rho, right));
  const double sab = von_neumann_entropy(rho);
  return std::max(0.0, sa + sb - sab);
}

double holevo_chi(const EnsembleCQ& e) {
  e.validate();
  ComplexMatrix avg =
      ComplexMatrix::Zero(e.states.front().dim(), e.states.front().dim());
  double avg_entropy = 0.0;
  for (size_t i = 0; i < e.probs.size(); ++i) {
    avg += e.probs[i] * e.states[i].mat;
    avg_entropy += e.probs[i] * von_neumann_entropy(e.states[i]);
  }
  DensityOperator mix{std::move(avg), {e.states.front().dim()}};
  return std::max(0.0, von_neumann_entropy(mix) - avg_entropy);
}

DensityOperator counterexample_state_unchecked(double p) {
  if (p <= 0.0 || p >= 1.0)
    throw std::invalid_argument("counterexample_state: p outside (0,1)");
  const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
  Eigen::Vector4cd v1 = Eigen::Vector4cd::Zero();
  v1(0) = sp;  // |00>
  v1(3) = sq;  // |11>
  Eigen::Vector4cd v2 = Eigen::Vector4cd::Zero();
  v2(1) = sp;  // |01>
  v2(2) = sq;  // |10>
  ComplexMatrix rho =
      p * (v1 * v1.adjoint()) + (1.0 - p) * (v2 * v2.adjoint());
  return make_density(std::move(rho), {2, 2});
}

DensityOperator counterexample_state(double p) {
  if (p == 0.5)
    throw std::invalid_argument(
        "counterexample_state: p = 1/2 excluded (state becomes separable)");
  return counterexample_state_unchecked(p);
}

double fuchs_lower_bound(double p1, double p2, double b_macro, double f_m) {
  if (std::abs(p1 + p2 - 1.0) > 1e-10 || p1 < 0.0 || p2 < 0.0)
    throw std::invalid_argument("fuchs_lower_bound: invalid probabilities");
  if (b_macro < 0.0 || b_macro > 1.0)
    throw std::invalid_argument("fuchs_lower_bound: B outside [0,1]");
  const double h = binary_entropy(p1);
  const double powered = b_macro > 0.0 ? std::exp(f_m * std::log(b_macro))
                                       : (f_m > 0.0 ? 0.0 : 1.0);
  return std::max(0.0, h - 2.0 * std::sqrt(p1 * p2) * powered);
}

double appendix_bound(double eps_e, double eps_fe, double b_micro,
                      double m_exponent, double p1, double p2) {
  if (eps_e < 0.0 || eps_e > 0.5 || eps_fe < 0.0 || eps_fe > 0.5)
    throw std::domain_error("appendix_bound: eps outside [0, 1/2]");
  if (b_micro < 0.0 || b_micro > 1.0)
    throw std::invalid_argument("appendix_bound: B outside [0,1]");
  const double powered = b_micro > 0.0
                             ? std::exp(m_exponent * std::log(b_micro))
                             : (m_exponent > 0.0 ? 0.0 : 1.0);
  return binary_entropy(eps_e / 2.0) + 2.0 * binary_entropy(eps_fe) +
         4.0 * eps_fe + 2.0 * std::sqrt(p1 * p2) * powered;
}

BoundResult theorem_bound(const ControlledUnitaryInstance& inst) {
  inst.validate();
  if (inst.n_obs == 0 || inst.n_obs == inst.n_total)
    throw std::invalid_argument("theorem_bound: requires 0 < f < 1");
  const double c12 = std::abs(inst.rho0_S.mat(0, 1));
  const double kap = std::abs(inst.kappa());
  const double p1 = inst.rho0_S.mat(0, 0).real();
  const double p2 = inst.rho0_S.mat(1, 1).real();

  BoundResult out;
  double eps_e = 2.0 * c12 * std::pow(kap, inst.n_total);
  double eps_fe = 2.0 * c12 * std::pow(kap, inst.n_traced());
  if (eps_e > 0.5 || eps_fe > 0.5) out.in_regime = false;
  eps_e = std::min(eps_e, 0.5);
  eps_fe = std::min(eps_fe, 0.5);
  out.value = appendix_bound(eps_e, eps_fe, inst.branch_overlap(),
                             inst.n_obs, p1, p2);
  return out;
}

}  // namespace sbsim

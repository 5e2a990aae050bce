// Information-theoretic measures, the convergence-bound machinery, and the
// entangled counterexample to the sufficiency of the mutual-information
// condition.

#pragma once

#include "sbsim/broadcast.hpp"
#include "sbsim/qmat.hpp"

namespace sbsim {

// Classical-quantum ensemble {p_i, rho_i}.
struct EnsembleCQ {
  std::vector<double> probs;
  std::vector<DensityOperator> states;

  void validate() const;
};

// I = S(A) + S(B) - S(AB) in bits across the cut after the first `n_first`
// tensor factors.
double mutual_information(const DensityOperator& rho, int n_first = 1);

// chi = S(sum p_i rho_i) - sum p_i S(rho_i), bits.
double holevo_chi(const EnsembleCQ& e);

// Two-qubit state satisfying I(A:B) = S(B) exactly while being entangled:
// rho_AB = p P(sqrt(p)|00> + sqrt(1-p)|11>) + (1-p) P(sqrt(p)|01> + sqrt(1-p)|10>).
// Rejects p = 1/2, where the state becomes PPT.
DensityOperator counterexample_state(double p);
// Same construction with the p = 1/2 rejection bypassed (boundary studies).
DensityOperator counterexample_state_unchecked(double p);

// H({p}) - 2 sqrt(p1 p2) B_macro^{fM}, clamped below at 0; a lower bound on
// the extractable classical information.
double fuchs_lower_bound(double p1, double p2, double b_macro, double f_m);

// h(eps_E/2) + 2 h(eps_fE) + 4 eps_fE + 2 sqrt(p1 p2) B_micro^{m_exponent};
// an upper bound on |H_S - I(S:fE)| for a qubit system. Requires
// eps_E, eps_fE in [0, 1/2].
double appendix_bound(double eps_e, double eps_fe, double b_micro,
                      double m_exponent, double p1, double p2);

struct BoundResult {
  double value = 0.0;
  // False when an epsilon had to be clamped into [0, 1/2], i.e. the bound's
  // validity regime was not yet reached at this time/size.
  bool in_regime = true;
};

// Evaluates eps_E, eps_fE and the branch-overlap term from a controlled-
// unitary instance and returns the general convergence bound. Requires
// 0 < n_obs < n_total.
BoundResult theorem_bound(const ControlledUnitaryInstance& inst);

}  // namespace sbsim

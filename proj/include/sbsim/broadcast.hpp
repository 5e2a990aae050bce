// Construction and verification of the post-scattering system:macro-fraction
// state: factored large-count representation, an explicit small-count oracle,
// and the spectrum-broadcast (Classical-Classical) form test.

#pragma once

#include "sbsim/qmat.hpp"
#include "sbsim/scatter.hpp"

namespace sbsim {

// A complex scalar kept as (log modulus, argument) so that astronomically
// large powers never overflow or underflow silently.
struct LogScalar {
  double log_abs = 0.0;  // natural log of the modulus; -inf encodes exact 0
  double phase = 0.0;    // argument (rad)

  static LogScalar from(Complex z);
  LogScalar pow(double n) const;

  // True when the modulus lies below the double-precision floor e^-700.
  bool underflow() const { return log_abs < -700.0; }
  double modulus() const;  // underflow collapses to exactly 0
  Complex value() const;
};

// sigma^{⊗count} without exponential storage. `base` may be a non-PSD cross
// block; `count` is integer-valued but stored as double since physical photon
// counts are astronomically large.
struct FactoredMacroState {
  ComplexMatrix base;
  double count = 0.0;
};

// Block form of rho_{S:fE}(t) for a two-state pointer observable: diagonal
// blocks carry the pointer probabilities and one representative macro-fraction
// state per branch (the f*M observed fractions are identical by symmetry);
// the coherent part is a coefficient, a powered decay factor, and a factored
// cross block.
struct SfEState {
  double p1 = 0.0, p2 = 0.0;       // pointer-basis populations of rho0_S
  FactoredMacroState branch1, branch2;  // per-photon branch state, count m*N_t
  double multiplicity = 0.0;       // number of observed macro-fractions, f/m
  Complex offdiag_coeff;           // <x1| rho0_S |x2>
  LogScalar offdiag_decay;         // (Tr S1 rho0_ph S2†)^{(1-f) N_t}
  FactoredMacroState offdiag_block;  // per-photon cross operator, count f*N_t
  LogScalar branch_overlap_powered;  // B(branch1, branch2)^{m N_t}
  double f = 0.0, m = 0.0, big_m = 0.0;  // fractions, big_m = 1/m
  double n_t = 0.0;
  LimitMode mode = LimitMode::finite_box;
};

// Distance of an SfEState from ideal spectrum-broadcast form.
struct BroadcastReport {
  double coherent_trace_norm = 0.0;
  double pairwise_overlap = 0.0;  // branch distinguishability per fraction
  bool overlap_underflow = false;
  double spectrum[2] = {0.0, 0.0};
  bool is_broadcast = false;
  double tolerance = 0.0;
  // Smallest fraction whose convergence bound drops below delta * H_S, and
  // the implied redundancy floor(1/f); 0 when no fraction qualifies.
  double redundancy_fraction = 0.0;
  double redundancy = 0.0;
};

// Pure single-mode environment at the model's k0.
SfEState build_sfe_state(const SphereModel& model, const DensityOperator& rho0_S,
                         double f, double m, double t, LimitMode mode);

// Mixed environment over a spectral measure.
SfEState build_sfe_state(const SphereModel& model, const SpectralMeasure& measure,
                         const DensityOperator& rho0_S, double f, double m,
                         double t, LimitMode mode, double od_scale = 1.0);

// ||coherent part||_tr = 2 |<x1|rho0_S|x2>| |Tr S1 rho0_ph S2†|^{(1-f) N_t},
// exact by unitary invariance of the trace norm.
double coherent_norm(const SfEState& state);

BroadcastReport verify_broadcast(const SfEState& state, double tol = 1e-4,
                                 double delta = 0.1);

// A 4x4 state on S ⊗ (2-dim Gram factor) with exactly the spectra of the true
// rho_{S:fE}(t) for a pure photon environment: the observed branch vectors are
// replaced by their Gram representatives, which is an isometry on the relevant
// subspace. micro_o is the single-photon overlap <k0|S2† S1 k0>.
DensityOperator gram_sfe_state(const DensityOperator& rho0_S, Complex micro_o,
                               double n_obs, double n_traced);
// Log-space per-photon overlap, for photon counts where 1 - |o| is below the
// double-precision resolution of a raw complex value.
DensityOperator gram_sfe_state(const DensityOperator& rho0_S, LogScalar micro_o,
                               double n_obs, double n_traced);

// Generic controlled-unitary model: U(t) = sum_i |x_i><x_i| ⊗ U_i^{⊗n}. The
// brute-force oracle every factored path is checked against.
struct ControlledUnitaryInstance {
  DensityOperator rho0_S;  // 2x2, pointer basis
  ComplexMatrix u1, u2;    // d x d unitaries
  DensityOperator rho0_E;  // d x d single-photon state
  int n_total = 0;
  int n_obs = 0;

  void validate() const;
  int n_traced() const { return n_total - n_obs; }
  Complex kappa() const;  // Tr U1 rho0_E U2†

  // Dense rho_{S:fE}: controlled-unitary conjugation of the full product
  // state, then partial trace of the unobserved photons. Dimension-guarded.
  DensityOperator explicit_state() const;

  // Same state assembled block-by-block from the analytic form
  // sum_ij c_ij kappa_ij^{n_traced} |i><j| ⊗ (U_i rho U_j†)^{⊗n_obs}.
  DensityOperator factored_state() const;

  double coherent_norm() const;   // 2 |c12| |kappa|^{n_traced}
  double branch_overlap() const;  // B(U1 rho U1†, U2 rho U2†) per photon
};

// Sphere-model instances on truncated per-photon spaces: the pure case lives
// in span{S1|k0>, S2|k0>}; the mixed case on the measure's mode set with the
// relative scattering operator unitarized by polar decomposition.
ControlledUnitaryInstance pure_instance(const SphereModel& model,
                                        const DensityOperator& rho0_S,
                                        int n_total, int n_obs);
ControlledUnitaryInstance mixed_instance(const SphereModel& model,
                                         const SpectralMeasure& measure,
                                         const DensityOperator& rho0_S,
                                         int n_total, int n_obs,
                                         double od_scale = 1.0);

// Nearest unitary (polar factor) of a square matrix.
ComplexMatrix unitarize(const ComplexMatrix& a);

}  // namespace sbsim

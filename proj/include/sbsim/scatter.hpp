// Illuminated-sphere scattering physics: box-normalized photon overlaps,
// decoherence times, receptivity, and the thermodynamic-limit closed forms
// for pure and mixed photon environments.
//
// Geometry convention: the displacement direction Δx̂ is the +z axis, so the
// angle Θ_k of a photon mode is the polar angle of its wave vector.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sbsim/qmat.hpp"

namespace sbsim {

// Raised when inputs leave the soft-photon / dipole validity sector.
class regime_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LimitMode { finite_box, thermodynamic };

struct SphereModel {
  double a = 1e-6;              // sphere radius (m)
  double epsilon = 2.0;         // relative permittivity
  double delta_x = 1e-6;        // separation between the two positions (m)
  double theta = 0.0;           // angle between k̂0 and Δx̂ (rad)
  double k0 = 1e4;              // wavenumber of the pure-case mode (1/m)
  double box_L = 1.0;           // box edge (m)
  double photon_density = 1e20; // N/V (1/m^3)
  double c_light = 299792458.0; // speed of light (m/s)

  // Validity thresholds; the physics only demands "much less than 1".
  double soft_threshold = 0.1;
  double dipole_threshold = 0.1;

  double a_tilde() const;       // a ((ε-1)/(ε+2))^{1/3}
  Eigen::Vector3d k0_vec() const;
  void validate() const;        // throws regime_error / invalid_argument
};

struct SpectralMode {
  Eigen::Vector3d k;  // wave vector (1/m)
  double p = 0.0;     // probability
};

struct SpectralMeasure {
  std::vector<SpectralMode> modes;

  bool injective() const;  // pairwise-distinct probabilities
  void validate(const SphereModel& model) const;
};

// Uniform directional grid (Fibonacci sphere) at fixed |k|. A tiny probability
// tilt (relative, mode-indexed) keeps the measure injective; pass tilt = 0 for
// exactly equal weights.
SpectralMeasure fibonacci_isotropic(int n_points, double k_mag,
                                    double tilt = 1e-9);

// Single-photon overlap <k0|S2† S1 k0> of the dipole expansion, truncated at
// O((kΔx)^3 / L^2).
Complex micro_overlap(const SphereModel& model, const Eigen::Vector3d& k);
Complex micro_overlap(const SphereModel& model);  // at the model's k0, theta

double decoherence_time(const SphereModel& model);  // τ_D (s)

// N_t = L^2 (N/V) c t; rounded to the nearest integer when `rounded`.
double photon_count(const SphereModel& model, double t, bool rounded = true);

// |Tr S1 ρ0 S2†|^{(1-f) N_t} in the finite box, e^{-(1-f)t/τ_D} in the
// thermodynamic limit.
double decoherence_factor(const SphereModel& model, double f, double t,
                          LimitMode mode);

// Overlap of macro-fraction branch states, pure environment.
double macro_overlap_pure(const SphereModel& model, double m, double t,
                          LimitMode mode);

// Phase accumulation rate of the cross term, thermodynamic limit:
// d(arg)/dt of (Tr S1 ρ0 S2†)^{N_t} per unit macro-time.
double cross_phase_rate(const SphereModel& model);

enum class Execution { serial, parallel };

// Relative scattering operator A = S1† S2 restricted to the measure's mode
// set. Diagonal from the dipole expansion; off-diagonal couplings act within
// elastic shells (equal |k|), carry the Rayleigh angular kernel, and are
// scaled to the unitarity budget 1 - |diag|^2 (od_scale = 1 spends the full
// budget on a shell-covering grid, 0 disables the channel).
ComplexMatrix relative_smatrix(const SphereModel& model,
                               const SpectralMeasure& measure,
                               double od_scale = 1.0);

// M_{k k''} = sqrt(p_k p_k'') Σ_{k'} p_{k'} A_{k k'} conj(A_{k'' k'}).
ComplexMatrix m_matrix(const SphereModel& model, const SpectralMeasure& measure,
                       double od_scale = 1.0);

double eta_bar(const SphereModel& model, const SpectralMeasure& measure,
               double od_scale = 1.0);
double eta_bar_prime(const SphereModel& model, const SpectralMeasure& measure,
                     double od_scale = 1.0,
                     Execution exec = Execution::serial);
// α = (η̄ - η̄') / η̄; throws std::domain_error when η̄ = 0 and
// validity_error when η̄' exceeds η̄ beyond round-off (model truncation).
double receptivity(const SphereModel& model, const SpectralMeasure& measure,
                   double od_scale = 1.0);

// Modified decoherence time averaged over the measure.
double tau_bar(const SphereModel& model, const SpectralMeasure& measure);

// Perturbative eigenvalues m(k) = p(k)^2 (1 - 2 Re b_kk) of M; requires an
// injective (non-degenerate) measure.
std::vector<double> m_eigen_perturbative(const SphereModel& model,
                                         const SpectralMeasure& measure,
                                         double od_scale = 1.0);

// Closed form B(ρ1^mic, ρ2^mic) = 1 - (η̄ - η̄')/L^2.
double bhattacharyya_micro_mixed(const SphereModel& model,
                                 const SpectralMeasure& measure,
                                 double od_scale = 1.0);

// Exact route: Tr sqrt(M) by Hermitian eigendecomposition.
double bhattacharyya_micro_exact(const SphereModel& model,
                                 const SpectralMeasure& measure,
                                 double od_scale = 1.0);

// Macro-fraction branch overlap, mixed environment:
// finite box (1 - α η̄ / L^2)^{m N_t}, thermodynamic exp(-α m t / τ̄_D).
double macro_overlap_mixed(const SphereModel& model,
                           const SpectralMeasure& measure, double m, double t,
                           LimitMode mode, double od_scale = 1.0);

}  // namespace sbsim

// Dense complex linear algebra for small Hilbert spaces.
//
// Conventions used throughout the library:
//   - all entropies are in bits (log base 2), so a maximally mixed qubit has
//     entropy exactly 1;
//   - eigenvalues of nominally PSD operators in [-1e-10, 0) are treated as
//     round-off and clamped to 0, anything more negative is a validity error;
//   - nominally Hermitian intermediates are symmetrized (A + A†)/2 before
//     eigendecomposition.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sbsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

constexpr double kHermTol = 1e-10;
constexpr double kEigClampTol = 1e-10;

// Thrown when an operator fails a density-operator validity check
// (non-Hermitian, trace != 1, or genuinely negative spectrum).
class validity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hermitian, PSD, unit-trace matrix with a record of its tensor factors.
struct DensityOperator {
  ComplexMatrix mat;
  std::vector<Eigen::Index> subsystem_dims;

  Eigen::Index dim() const { return mat.rows(); }
};

bool all_finite(const ComplexMatrix& a);

// Validates the invariants and returns the operator; throws validity_error.
DensityOperator make_density(ComplexMatrix mat,
                             std::vector<Eigen::Index> subsystem_dims,
                             double tol = kHermTol);

DensityOperator pure_density(const Eigen::VectorXcd& psi,
                             std::vector<Eigen::Index> subsystem_dims);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Kronecker power b^{⊗n}, n >= 0.
ComplexMatrix kron_power(const ComplexMatrix& b, int n);

// Reduces onto the subsystems listed in `keep` (indices into subsystem_dims,
// strictly increasing). Trace is preserved.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep);

// Sum of singular values. Requires a square matrix.
double trace_norm(const ComplexMatrix& a);

// Generalized overlap (Bhattacharyya coefficient) B = Tr sqrt(sqrt(r1) r2 sqrt(r1)).
double gen_overlap(const DensityOperator& r1, const DensityOperator& r2);

// Von Neumann entropy in bits, with 0 log 0 = 0.
double von_neumann_entropy(const DensityOperator& rho);

// Minimum eigenvalue of the partial transpose over `subsystem` (0 or 1) of a
// bipartite state. Negative values certify entanglement.
double partial_transpose_min_eig(const DensityOperator& rho, int subsystem);

// Binary Shannon entropy in bits, p in [0, 1].
double binary_entropy(double p);

// Eigenvalues of the symmetrized matrix, ascending, with round-off negatives
// clamped to 0. Throws validity_error below -clamp_tol when `strict`.
std::vector<double> clamped_spectrum(const ComplexMatrix& herm,
                                     double clamp_tol = kEigClampTol,
                                     bool strict = true);

// Hermitian square root via eigendecomposition (clamping as above).
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& herm);

}  // namespace sbsim

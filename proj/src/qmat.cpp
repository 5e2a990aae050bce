#include "sbsim/qmat.hpp"

#include <algorithm>
#include <cmath>

namespace sbsim {

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        return false;
  return true;
}

namespace {

ComplexMatrix symmetrize(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

Eigen::Index dims_product(const std::vector<Eigen::Index>& dims) {
  Eigen::Index p = 1;
  for (auto d : dims) p *= d;
  return p;
}

}  // namespace

DensityOperator make_density(ComplexMatrix mat,
                             std::vector<Eigen::Index> subsystem_dims,
                             double tol) {
  if (mat.rows() != mat.cols())
    throw std::invalid_argument("density operator must be square");
  if (subsystem_dims.empty()) subsystem_dims = {mat.rows()};
  if (dims_product(subsystem_dims) != mat.rows())
    throw std::invalid_argument("subsystem_dims do not multiply to dim");
  if (!all_finite(mat)) throw validity_error("non-finite entries");
  const double herm_gap = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm_gap > tol) throw validity_error("not Hermitian within tolerance");
  const double tr_gap = std::abs(mat.trace() - Complex(1.0, 0.0));
  if (tr_gap > tol) throw validity_error("trace differs from 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(symmetrize(mat),
                                                  Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigClampTol)
    throw validity_error("negative eigenvalue beyond round-off");
  return DensityOperator{std::move(mat), std::move(subsystem_dims)};
}

DensityOperator pure_density(const Eigen::VectorXcd& psi,
                             std::vector<Eigen::Index> subsystem_dims) {
  Eigen::VectorXcd n = psi / psi.norm();
  return make_density(n * n.adjoint(), std::move(subsystem_dims));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!all_finite(a) || !all_finite(b))
    throw std::invalid_argument("tensor: non-finite operand");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  DensityOperator out;
  out.mat = tensor(a.mat, b.mat);
  out.subsystem_dims = a.subsystem_dims;
  out.subsystem_dims.insert(out.subsystem_dims.end(), b.subsystem_dims.begin(),
                            b.subsystem_dims.end());
  return out;
}

ComplexMatrix kron_power(const ComplexMatrix& b, int n) {
  if (n < 0) throw std::invalid_argument("kron_power: negative exponent");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = tensor(out, b);
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& keep) {
  const auto& dims = rho.subsystem_dims;
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw std::invalid_argument("partial_trace: index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep must be increasing");
  }

  std::vector<int> traced;
  for (int i = 0; i < n; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);

  // Row-major strides of each subsystem index in the flat index.
  std::vector<Eigen::Index> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  Eigen::Index dk = 1, dt = 1;
  for (int i : keep) dk *= dims[i];
  for (int i : traced) dt *= dims[i];

  auto unflatten = [&](Eigen::Index idx, const std::vector<int>& subs,
                       std::vector<Eigen::Index>& out) {
    for (int s = static_cast<int>(subs.size()) - 1; s >= 0; --s) {
      out[s] = idx % dims[subs[s]];
      idx /= dims[subs[s]];
    }
  };

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  std::vector<Eigen::Index> ki(keep.size()), kj(keep.size()), ti(traced.size());
  for (Eigen::Index rk = 0; rk < dk; ++rk) {
    unflatten(rk, keep, ki);
    for (Eigen::Index ck = 0; ck < dk; ++ck) {
      unflatten(ck, keep, kj);
      Complex acc = 0.0;
      for (Eigen::Index tr = 0; tr < dt; ++tr) {
        unflatten(tr, traced, ti);
        Eigen::Index row = 0, col = 0;
        for (size_t s = 0; s < keep.size(); ++s) {
          row += ki[s] * stride[keep[s]];
          col += kj[s] * stride[keep[s]];
        }
        for (size_t s = 0; s < traced.size(); ++s) {
          row += ti[s] * stride[traced[s]];
          col += ti[s] * stride[traced[s]];
        }
        acc += rho.mat(row, col);
      }
      out(rk, ck) = acc;
    }
  }

  DensityOperator result;
  result.mat = std::move(out);
  for (int i : keep) result.subsystem_dims.push_back(dims[i]);
  return result;
}

double trace_norm(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("trace_norm: non-square input");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

std::vector<double> clamped_spectrum(const ComplexMatrix& herm,
                                     double clamp_tol, bool strict) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(symmetrize(herm),
                                                  Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(i);
    if (v < 0.0) {
      if (strict && v < -clamp_tol)
        throw validity_error("negative eigenvalue beyond round-off");
      v = 0.0;
    }
    out[static_cast<size_t>(i)] = v;
  }
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& herm) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 *
                                                  (herm + herm.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0 ? std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double gen_overlap(const DensityOperator& r1, const DensityOperator& r2) {
  if (r1.dim() != r2.dim())
    throw std::invalid_argument("gen_overlap: dimension mismatch");
  ComplexMatrix s1 = matrix_sqrt_psd(r1.mat);
  ComplexMatrix prod = s1 * r2.mat * s1;
  // prod is PSD up to round-off; clamp without strictness (its negatives come
  // from the double matrix product, not from the inputs).
  auto ev = clamped_spectrum(prod, 1.0, false);
  double b = 0.0;
  for (double v : ev) b += std::sqrt(v);
  return std::min(b, 1.0 + 1e-9);
}

double von_neumann_entropy(const DensityOperator& rho) {
  auto ev = clamped_spectrum(rho.mat);
  double s = 0.0;
  for (double v : ev)
    if (v > 0.0) s -= v * std::log2(v);
  return s < 0.0 ? 0.0 : s;
}

double partial_transpose_min_eig(const DensityOperator& rho, int subsystem) {
  if (rho.subsystem_dims.size() != 2)
    throw std::invalid_argument("partial transpose needs a bipartite state");
  if (subsystem != 0 && subsystem != 1)
    throw std::invalid_argument("subsystem must be 0 or 1");
  const Eigen::Index da = rho.subsystem_dims[0], db = rho.subsystem_dims[1];
  ComplexMatrix pt(da * db, da * db);
  for (Eigen::Index i1 = 0; i1 < da; ++i1)
    for (Eigen::Index i2 = 0; i2 < db; ++i2)
      for (Eigen::Index j1 = 0; j1 < da; ++j1)
        for (Eigen::Index j2 = 0; j2 < db; ++j2) {
          Eigen::Index r = i1 * db + i2, c = j1 * db + j2;
          Eigen::Index rt = (subsystem == 0) ? j1 * db + i2 : i1 * db + j2;
          Eigen::Index ct = (subsystem == 0) ? i1 * db + j2 : j1 * db + i2;
          pt(rt, ct) = rho.mat(r, c);
        }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (pt + pt.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0)
    throw std::domain_error("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

}  // namespace sbsim

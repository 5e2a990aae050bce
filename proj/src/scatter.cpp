#include "sbsim/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef SBSIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace sbsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Rayleigh angular kernel, normalized to unit integral over the sphere.
double rayleigh_kernel(double cos_gamma) {
  return 3.0 / (16.0 * kPi) * (1.0 + cos_gamma * cos_gamma);
}

// Groups mode indices into elastic shells (equal |k| up to round-off).
std::vector<std::vector<int>> elastic_shells(const SpectralMeasure& measure) {
  const int n = static_cast<int>(measure.modes.size());
  std::vector<std::vector<int>> shells;
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<int> shell{i};
    used[i] = true;
    const double ki = measure.modes[i].k.norm();
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      const double kj = measure.modes[j].k.norm();
      if (std::abs(ki - kj) <= 1e-9 * std::max(ki, kj)) {
        shell.push_back(j);
        used[j] = true;
      }
    }
    shells.push_back(std::move(shell));
  }
  return shells;
}

double angular_factor(double cos_theta) {
  return 3.0 + 11.0 * cos_theta * cos_theta;
}

}  // namespace

double SphereModel::a_tilde() const {
  return a * std::cbrt((epsilon - 1.0) / (epsilon + 2.0));
}

Eigen::Vector3d SphereModel::k0_vec() const {
  return k0 * Eigen::Vector3d(std::sin(theta), 0.0, std::cos(theta));
}

void SphereModel::validate() const {
  if (a <= 0.0 || box_L <= 0.0 || photon_density <= 0.0 || c_light <= 0.0 ||
      k0 <= 0.0 || epsilon <= 0.0 || delta_x < 0.0)
    throw std::invalid_argument("SphereModel: non-positive parameter");
  if (k0 * delta_x >= soft_threshold)
    throw regime_error("SphereModel: k0*delta_x outside the soft sector");
  if (k0 * a >= dipole_threshold)
    throw regime_error("SphereModel: k0*a outside the dipole approximation");
}

bool SpectralMeasure::injective() const {
  for (size_t i = 0; i < modes.size(); ++i)
    for (size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i].p == modes[j].p) return false;
  return true;
}

void SpectralMeasure::validate(const SphereModel& model) const {
  if (modes.empty()) throw std::invalid_argument("SpectralMeasure: empty");
  double sum = 0.0;
  for (const auto& m : modes) {
    if (m.p <= 0.0) throw std::invalid_argument("SpectralMeasure: p <= 0");
    sum += m.p;
    if (m.k.norm() * model.delta_x >= model.soft_threshold)
      throw regime_error("SpectralMeasure: mode outside the soft sector");
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("SpectralMeasure: probabilities do not sum to 1");
}

SpectralMeasure fibonacci_isotropic(int n_points, double k_mag, double tilt) {
  if (n_points < 1) throw std::invalid_argument("fibonacci_isotropic: n < 1");
  SpectralMeasure out;
  out.modes.resize(static_cast<size_t>(n_points));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  double norm = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n_points;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.modes[i].k =
        k_mag * Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z);
    out.modes[i].p = 1.0 + tilt * i;
    norm += out.modes[i].p;
  }
  for (auto& m : out.modes) m.p /= norm;
  return out;
}

Complex micro_overlap(const SphereModel& model, const Eigen::Vector3d& k) {
  const double kmag = k.norm();
  if (kmag <= 0.0) throw std::invalid_argument("micro_overlap: |k| = 0");
  if (kmag * model.delta_x >= model.soft_threshold)
    throw regime_error("micro_overlap: k*delta_x outside the soft sector");
  const double cos_t = k.z() / kmag;
  const double at6 = std::pow(model.a_tilde(), 6);
  const double L2 = model.box_L * model.box_L;
  const double im = 8.0 * kPi * model.delta_x * std::pow(kmag, 5) * at6 /
                    (3.0 * L2) * cos_t;
  const double re = 2.0 * kPi * model.delta_x * model.delta_x *
                    std::pow(kmag, 6) * at6 / (15.0 * L2) *
                    angular_factor(cos_t);
  return Complex(1.0 - re, im);
}

Complex micro_overlap(const SphereModel& model) {
  return micro_overlap(model, model.k0_vec());
}

double decoherence_time(const SphereModel& model) {
  const double rate = 2.0 * kPi / 15.0 * model.photon_density *
                      model.delta_x * model.delta_x * model.c_light *
                      std::pow(model.k0, 6) * std::pow(model.a_tilde(), 6) *
                      angular_factor(std::cos(model.theta));
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double photon_count(const SphereModel& model, double t, bool rounded) {
  if (t < 0.0) throw std::invalid_argument("photon_count: negative time");
  const double nt =
      model.box_L * model.box_L * model.photon_density * model.c_light * t;
  return rounded ? static_cast<double>(std::llround(nt)) : nt;
}

double decoherence_factor(const SphereModel& model, double f, double t,
                          LimitMode mode) {
  if (f < 0.0 || f > 1.0)
    throw std::invalid_argument("decoherence_factor: f outside [0,1]");
  if (t < 0.0) throw std::invalid_argument("decoherence_factor: negative time");
  if (mode == LimitMode::thermodynamic)
    return std::exp(-(1.0 - f) * t / decoherence_time(model));
  const double nt = photon_count(model, t);
  const double log_o = std::log(std::abs(micro_overlap(model)));
  return std::exp((1.0 - f) * nt * log_o);
}

double macro_overlap_pure(const SphereModel& model, double m, double t,
                          LimitMode mode) {
  if (m <= 0.0 || m > 1.0)
    throw std::invalid_argument("macro_overlap_pure: m outside (0,1]");
  if (t < 0.0) throw std::invalid_argument("macro_overlap_pure: negative time");
  if (mode == LimitMode::thermodynamic)
    return std::exp(-m * t / decoherence_time(model));
  const double nt = photon_count(model, t);
  const double log_o = std::log(std::abs(micro_overlap(model)));
  return std::exp(m * nt * log_o);
}

double cross_phase_rate(const SphereModel& model) {
  return model.c_light * model.photon_density * 8.0 * kPi / 3.0 *
         model.delta_x * std::pow(model.k0, 5) * std::pow(model.a_tilde(), 6) *
         std::cos(model.theta);
}

ComplexMatrix relative_smatrix(const SphereModel& model,
                               const SpectralMeasure& measure,
                               double od_scale) {
  measure.validate(model);
  const int n = static_cast<int>(measure.modes.size());
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  // A = S1† S2 = conj of the S2† S1 diagonal expansion.
  for (int i = 0; i < n; ++i)
    a(i, i) = std::conj(micro_overlap(model, measure.modes[i].k));

  if (od_scale != 0.0) {
    for (const auto& shell : elastic_shells(measure)) {
      const int sz = static_cast<int>(shell.size());
      if (sz < 2) continue;
      const double w = 4.0 * kPi / sz;  // per-direction quadrature weight
      std::vector<double> budget(shell.size());
      for (size_t s = 0; s < shell.size(); ++s) {
        const double d2 = std::norm(a(shell[s], shell[s]));
        budget[s] = std::max(0.0, 1.0 - d2);
      }
      for (size_t s = 0; s < shell.size(); ++s) {
        for (size_t u = s + 1; u < shell.size(); ++u) {
          const int i = shell[s], j = shell[u];
          const double cg = measure.modes[i].k.normalized().dot(
              measure.modes[j].k.normalized());
          const double mag2 = od_scale * od_scale *
                              0.5 * (budget[s] + budget[u]) *
                              rayleigh_kernel(cg) * w;
          const Complex v(0.0, std::sqrt(mag2));
          a(i, j) = v;
          a(j, i) = v;
        }
      }
    }
  }
  return a;
}

ComplexMatrix m_matrix(const SphereModel& model, const SpectralMeasure& measure,
                       double od_scale) {
  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  const int n = static_cast<int>(measure.modes.size());
  Eigen::VectorXd p(n), sp(n);
  for (int i = 0; i < n; ++i) {
    p(i) = measure.modes[i].p;
    sp(i) = std::sqrt(p(i));
  }
  ComplexMatrix apa = a * p.asDiagonal() * a.adjoint();
  return sp.asDiagonal() * apa * sp.asDiagonal();
}

double eta_bar(const SphereModel& model, const SpectralMeasure& measure,
               double od_scale) {
  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  double s = 0.0;
  for (size_t i = 0; i < measure.modes.size(); ++i)
    s += measure.modes[i].p * std::norm(a(i, i));
  return 0.5 * model.box_L * model.box_L * (1.0 - s);
}

double eta_bar_prime(const SphereModel& model, const SpectralMeasure& measure,
                     double od_scale, Execution exec) {
  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  const int n = static_cast<int>(measure.modes.size());
  std::vector<double> row_sum(n, 0.0);
  if (exec == Execution::parallel) {
#ifdef SBSIM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) acc += std::norm(a(i, j));
      row_sum[i] = measure.modes[i].p * acc;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) acc += std::norm(a(i, j));
      row_sum[i] = measure.modes[i].p * acc;
    }
  }
  // Serial accumulation in index order keeps the result thread-count
  // independent.
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += row_sum[i];
  return 0.5 * model.box_L * model.box_L * s;
}

double receptivity(const SphereModel& model, const SpectralMeasure& measure,
                   double od_scale) {
  const double eb = eta_bar(model, measure, od_scale);
  if (eb <= 0.0)
    throw std::domain_error("receptivity: eta_bar = 0, no decoherence");
  const double ebp = eta_bar_prime(model, measure, od_scale);
  if (ebp > eb * (1.0 + 1e-6))
    throw validity_error("receptivity: eta_bar' > eta_bar (model truncation)");
  double alpha = (eb - ebp) / eb;
  return std::clamp(alpha, 0.0, 1.0);
}

double tau_bar(const SphereModel& model, const SpectralMeasure& measure) {
  measure.validate(model);
  double avg = 0.0;
  for (const auto& m : measure.modes) {
    const double kmag = m.k.norm();
    const double cos_t = m.k.z() / kmag;
    avg += m.p * std::pow(kmag, 6) * angular_factor(cos_t);
  }
  const double rate = 2.0 * kPi / 15.0 * model.photon_density *
                      model.delta_x * model.delta_x * model.c_light *
                      std::pow(model.a_tilde(), 6) * avg;
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

std::vector<double> m_eigen_perturbative(const SphereModel& model,
                                         const SpectralMeasure& measure,
                                         double od_scale) {
  if (!measure.injective())
    throw std::invalid_argument(
        "m_eigen_perturbative: degenerate measure (needs pairwise-distinct "
        "probabilities)");
  const ComplexMatrix a = relative_smatrix(model, measure, od_scale);
  std::vector<double> out(measure.modes.size());
  for (size_t i = 0; i < measure.modes.size(); ++i) {
    const double p = measure.modes[i].p;
    // b_kk = 1 - A_kk, so 1 - 2 Re b_kk = 2 Re A_kk - 1.
    out[i] = p * p * (2.0 * a(i, i).real() - 1.0);
  }
  return out;
}

double bhattacharyya_micro_mixed(const SphereModel& model,
                                 const SpectralMeasure& measure,
                                 double od_scale) {
  const double eb = eta_bar(model, measure, od_scale);
  const double ebp = eta_bar_prime(model, measure, od_scale);
  return 1.0 - (eb - ebp) / (model.box_L * model.box_L);
}

double bhattacharyya_micro_exact(const SphereModel& model,
                                 const SpectralMeasure& measure,
                                 double od_scale) {
  const ComplexMatrix m = m_matrix(model, measure, od_scale);
  auto ev = clamped_spectrum(m, 1.0, false);
  double b = 0.0;
  for (double v : ev) b += std::sqrt(v);
  return b;
}

double macro_overlap_mixed(const SphereModel& model,
                           const SpectralMeasure& measure, double m, double t,
                           LimitMode mode, double od_scale) {
  if (m <= 0.0 || m > 1.0)
    throw std::invalid_argument("macro_overlap_mixed: m outside (0,1]");
  if (t < 0.0) throw std::invalid_argument("macro_overlap_mixed: negative time");
  const double alpha = receptivity(model, measure, od_scale);
  if (mode == LimitMode::thermodynamic)
    return std::exp(-alpha * m * t / tau_bar(model, measure));
  const double eb = eta_bar(model, measure, od_scale);
  const double x = alpha * eb / (model.box_L * model.box_L);
  if (x >= 1.0)
    throw regime_error("macro_overlap_mixed: per-photon loss >= 1 at this L");
  const double nt = photon_count(model, t);
  return std::exp(m * nt * std::log1p(-x));
}

}  // namespace sbsim

// Benchmark: serial reference kernels vs the OpenMP-parallel variants, with a
// bitwise agreement check between the two paths.

#include <chrono>
#include <cstdio>

#include "sbsim/broadcast.hpp"
#include "sbsim/sweep.hpp"

using namespace sbsim;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main() {
  SphereModel model;
  model.delta_x = 1e-6;
  model.k0 = 1e4;

  // Kernel 1: eta_bar_prime double sum over a large isotropic shell.
  const SpectralMeasure measure = fibonacci_isotropic(1024, model.k0);
  double t0 = now_ms();
  const double serial = eta_bar_prime(model, measure, 1.0, Execution::serial);
  double t1 = now_ms();
  const double parallel =
      eta_bar_prime(model, measure, 1.0, Execution::parallel);
  double t2 = now_ms();
  std::printf("eta_bar_prime (1024 modes): serial %.1f ms, parallel %.1f ms, "
              "speedup %.2fx, bitwise equal: %s\n",
              t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
              serial == parallel ? "yes" : "NO");

  // Kernel 2: decoherence sweep over a time grid.
  const int n = 2000;
  DensityOperator rho0_S;
  {
    ComplexMatrix r(2, 2);
    r << 0.5, 0.5, 0.5, 0.5;
    rho0_S = make_density(std::move(r), {2});
  }
  const double tau = decoherence_time(model);
  std::vector<double> out_serial(n), out_parallel(n);
  auto kernel = [&](std::vector<double>& out) {
    return [&model, &rho0_S, tau, &out](int i) {
      const double t = 10.0 * tau * i / n;
      const SfEState st = build_sfe_state(model, rho0_S, 0.25, 0.25, t,
                                          LimitMode::finite_box);
      out[static_cast<size_t>(i)] = coherent_norm(st);
    };
  };
  t0 = now_ms();
  sweep_for(n, Execution::serial, kernel(out_serial));
  t1 = now_ms();
  sweep_for(n, Execution::parallel, kernel(out_parallel));
  t2 = now_ms();
  std::printf("decoherence sweep (%d points): serial %.1f ms, parallel %.1f "
              "ms, speedup %.2fx, bitwise equal: %s\n",
              n, t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
              out_serial == out_parallel ? "yes" : "NO");
  return (serial == parallel && out_serial == out_parallel) ? 0 : 1;
}

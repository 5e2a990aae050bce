// Experiment configuration, execution, and machine-readable result emission:
// one CSV per sweep plus a JSON metadata sidecar with the derived constants.

#pragma once

#include <string>

#include "sbsim/phases.hpp"

namespace sbsim {

enum class MeasureKind { single_mode, isotropic, inline_list };

struct ExperimentConfig {
  std::string kind;  // decoherence | phase-diagram | mixed-env | counterexample
                     // | pf-broadcast | oracle-check | bound-check
  SphereModel model;

  MeasureKind measure_kind = MeasureKind::single_mode;
  int iso_points = 128;
  double iso_tilt = 1e-9;
  double od_scale = 1.0;
  std::vector<SpectralMode> inline_modes;

  // rho0_S as a Bloch vector; default |+> (equal pointer weights).
  Eigen::Vector3d bloch = Eigen::Vector3d(1.0, 0.0, 0.0);

  std::vector<double> f_grid = {0.0};
  std::vector<int> micro_counts;
  double m = 0.25;
  std::vector<double> t_grid;  // in units of tau_D (tau_bar for mixed runs)
  LimitMode mode = LimitMode::thermodynamic;
  double tol = 1e-4;

  double p = 0.3;    // counterexample parameter
  int nt = 8;        // oracle-check photon count
  int n_random = 50; // pf-broadcast basis count / bound-check sweep size
  unsigned seed = 20240817;

  int workers = 0;  // 0: library default; env SBSIM_WORKERS overrides
  std::string out_path = "sbsim_out";

  void validate() const;  // throws std::invalid_argument / regime_error
};

// Parses the JSON text (all fields optional; defaults above). Unknown keys
// are rejected so typos fail loudly.
ExperimentConfig parse_config(const std::string& json_text);

// Builds the spectral measure a config describes.
SpectralMeasure config_measure(const ExperimentConfig& cfg);
DensityOperator config_rho0_s(const ExperimentConfig& cfg);

// 17-significant-digit decimal rendering; round-trips bit-exactly.
std::string format_real(double v);

// RFC-4180-style CSV: header row, '.' decimal separator. Throws
// std::runtime_error on I/O failure.
void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

// Executes the configured experiment, writing <out_path>.csv (or .json for
// the counterexample report) and <out_path>.meta.json. Returns a process
// exit status: 0 ok, 2 config validation, 3 numerical-regime violation,
// 4 I/O failure.
int run(const ExperimentConfig& cfg);

}  // namespace sbsim

// Command-line front end: experiment selection, JSON config loading, and
// flag overrides (flags win over the config file).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sbsim/cli.hpp"

namespace {

struct SubOptions {
  CLI::App* sub = nullptr;
  std::string config_path;
  double a = 0, epsilon = 0, delta_x = 0, theta = 0, k0 = 0, box_l = 0;
  double density = 0, m = 0, tol = 0, p = 0, od_scale = 0, tilt = 0;
  int nt = 0, n_random = 0, iso_points = 0, workers = 0;
  unsigned seed = 0;
  std::string mode, out, measure_kind;
  std::vector<double> f_grid, t_grid;
  std::vector<int> micro_counts;
};

void add_options(SubOptions& o) {
  CLI::App* s = o.sub;
  s->add_option("--config", o.config_path, "JSON config file");
  s->add_option("--a", o.a, "sphere radius (m)");
  s->add_option("--epsilon", o.epsilon, "relative permittivity");
  s->add_option("--delta-x", o.delta_x, "position separation (m)");
  s->add_option("--theta", o.theta, "angle between k0 and the separation (rad)");
  s->add_option("--k0", o.k0, "illumination wavenumber (1/m)");
  s->add_option("--box-L", o.box_l, "box edge (m)");
  s->add_option("--density", o.density, "photon density N/V (1/m^3)");
  s->add_option("--m", o.m, "macro-fraction size");
  s->add_option("--f", o.f_grid, "observed fraction grid");
  s->add_option("--t", o.t_grid, "time grid in units of tau_D");
  s->add_option("--micro", o.micro_counts, "micro-fraction photon counts");
  s->add_option("--mode", o.mode, "finite_box | thermodynamic");
  s->add_option("--tol", o.tol, "broadcast tolerance");
  s->add_option("--p", o.p, "counterexample parameter");
  s->add_option("--nt", o.nt, "oracle-check photon count (<= 10)");
  s->add_option("--n-random", o.n_random, "randomized sweep size");
  s->add_option("--seed", o.seed, "RNG seed");
  s->add_option("--measure", o.measure_kind, "single | isotropic");
  s->add_option("--iso-points", o.iso_points, "isotropic grid size");
  s->add_option("--tilt", o.tilt, "isotropic probability tilt");
  s->add_option("--od-scale", o.od_scale, "off-diagonal coupling scale");
  s->add_option("--workers", o.workers, "worker thread count");
  s->add_option("--out", o.out, "output path prefix");
}

bool given(const SubOptions& o, const std::string& name) {
  return o.sub->count(name) > 0;
}

int apply_and_run(const SubOptions& o, const std::string& kind) {
  sbsim::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      std::cerr << "cannot read config file: " << o.config_path << '\n';
      return 4;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      cfg = sbsim::parse_config(buf.str());
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
  }
  cfg.kind = kind;
  if (given(o, "--a")) cfg.model.a = o.a;
  if (given(o, "--epsilon")) cfg.model.epsilon = o.epsilon;
  if (given(o, "--delta-x")) cfg.model.delta_x = o.delta_x;
  if (given(o, "--theta")) cfg.model.theta = o.theta;
  if (given(o, "--k0")) cfg.model.k0 = o.k0;
  if (given(o, "--box-L")) cfg.model.box_L = o.box_l;
  if (given(o, "--density")) cfg.model.photon_density = o.density;
  if (given(o, "--m")) cfg.m = o.m;
  if (given(o, "--f")) cfg.f_grid = o.f_grid;
  if (given(o, "--t")) cfg.t_grid = o.t_grid;
  if (given(o, "--micro")) cfg.micro_counts = o.micro_counts;
  if (given(o, "--mode")) {
    if (o.mode == "finite_box") cfg.mode = sbsim::LimitMode::finite_box;
    else if (o.mode == "thermodynamic") cfg.mode = sbsim::LimitMode::thermodynamic;
    else {
      std::cerr << "unknown mode: " << o.mode << '\n';
      return 2;
    }
  }
  if (given(o, "--tol")) cfg.tol = o.tol;
  if (given(o, "--p")) cfg.p = o.p;
  if (given(o, "--nt")) cfg.nt = o.nt;
  if (given(o, "--n-random")) cfg.n_random = o.n_random;
  if (given(o, "--seed")) cfg.seed = o.seed;
  if (given(o, "--measure")) {
    if (o.measure_kind == "single")
      cfg.measure_kind = sbsim::MeasureKind::single_mode;
    else if (o.measure_kind == "isotropic")
      cfg.measure_kind = sbsim::MeasureKind::isotropic;
    else {
      std::cerr << "unknown measure kind: " << o.measure_kind << '\n';
      return 2;
    }
  }
  if (given(o, "--iso-points")) cfg.iso_points = o.iso_points;
  if (given(o, "--tilt")) cfg.iso_tilt = o.tilt;
  if (given(o, "--od-scale")) cfg.od_scale = o.od_scale;
  if (given(o, "--workers")) cfg.workers = o.workers;
  if (given(o, "--out")) cfg.out_path = o.out;

  const int status = sbsim::run(cfg);
  if (status == 2) std::cerr << "config validation failed\n";
  if (status == 3) std::cerr << "numerical-regime violation\n";
  if (status == 4) std::cerr << "I/O failure\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum-broadcast simulator for the illuminated-sphere model"};
  app.require_subcommand(1);

  const std::pair<const char*, const char*> kinds[] = {
      {"decoherence", "coherent-norm and macro-overlap decay sweep"},
      {"phase-diagram", "mutual information vs observed fraction"},
      {"mixed-env", "mixed-environment receptivity and overlap sweep"},
      {"counterexample", "entangled state satisfying the QD condition"},
      {"pf-broadcast", "stationary-spectrum broadcasting check"},
      {"oracle-check", "factored vs explicit state comparison"},
      {"bound-check", "randomized convergence-bound sweep"},
  };
  std::vector<SubOptions> opts(std::size(kinds));
  for (size_t i = 0; i < std::size(kinds); ++i) {
    opts[i].sub = app.add_subcommand(kinds[i].first, kinds[i].second);
    add_options(opts[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (size_t i = 0; i < std::size(kinds); ++i)
    if (opts[i].sub->parsed()) return apply_and_run(opts[i], kinds[i].first);
  return 2;
}

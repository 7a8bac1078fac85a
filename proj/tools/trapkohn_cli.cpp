// trapkohn: command-line front end for the trapped Luttinger-model mobility
// library. Exit codes: 0 success, 1 check failed, 2 domain/validation error,
// 3 I/O error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trapkohn/io.hpp"
#include "trapkohn/trapkohn.hpp"

namespace {

using namespace trapkohn;
using nlohmann::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelParams model;
  std::optional<double> n_fermions;
  std::optional<double> alpha;

  long n_max = kDefaultModes;
  long homogeneous_n_max = 2000;
  std::size_t quad_order = kDefaultQuadOrder;
  double eta = kDefaultEtaRel;
  double gamma = oracle::kDefaultGammaRel;
  std::size_t nodes = 511;
  std::optional<double> dt;
  std::string delta = "linear_split";

  double z = 0.0;
  double z0 = 0.0;
  double omega_min = 0.05;
  double omega_max = 3.5;
  double omega_step = 0.005;
  double omega = 0.5;
  std::string modes = "1..4";
  std::string method = "mode_sum";
  bool homogeneous = false;

  std::string output = "-";
  std::string format = "csv";

  bool reduced_length = true;
  bool reduced_frequency = true;

  double length_unit() const { return reduced_length ? model.l_fermi : 1.0; }
  double frequency_unit() const { return reduced_frequency ? model.omega_l : 1.0; }
};

/// Command-line values; each one that is set overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<double> vc, omega_l, l_fermi, hbar, n_fermions, alpha;
  std::optional<long> n_max, homogeneous_n_max;
  std::optional<std::size_t> quad_order, nodes;
  std::optional<double> eta, gamma, dt;
  std::optional<std::string> delta;
  std::optional<double> z, z0, omega_min, omega_max, omega_step, omega;
  std::optional<std::string> modes, method;
  bool homogeneous = false;
  std::optional<std::string> output, format;
  std::string trajectory;
  std::vector<std::size_t> probes;
  std::size_t stride = 10;
};

template <class T> void read_key(const json &obj, const char *key, T &dst) {
  if (obj.contains(key))
    dst = obj.at(key).get<T>();
}

template <class T> void read_key(const json &obj, const char *key, std::optional<T> &dst) {
  if (obj.contains(key))
    dst = obj.at(key).get<T>();
}

void apply_json(RunConfig &cfg, const json &j) {
  if (j.contains("model")) {
    const auto &m = j.at("model");
    read_key(m, "vtilde_c", cfg.model.vtilde_c);
    read_key(m, "omega_l", cfg.model.omega_l);
    read_key(m, "l_fermi", cfg.model.l_fermi);
    read_key(m, "hbar", cfg.model.hbar);
    read_key(m, "N", cfg.n_fermions);
    read_key(m, "alpha", cfg.alpha);
  }
  if (j.contains("numerics")) {
    const auto &n = j.at("numerics");
    read_key(n, "n_max", cfg.n_max);
    read_key(n, "homogeneous_n_max", cfg.homogeneous_n_max);
    read_key(n, "quad_order", cfg.quad_order);
    read_key(n, "eta", cfg.eta);
    read_key(n, "gamma", cfg.gamma);
    read_key(n, "nodes", cfg.nodes);
    read_key(n, "dt", cfg.dt);
    read_key(n, "delta", cfg.delta);
  }
  if (j.contains("task")) {
    const auto &t = j.at("task");
    read_key(t, "z", cfg.z);
    read_key(t, "z0", cfg.z0);
    read_key(t, "omega_min", cfg.omega_min);
    read_key(t, "omega_max", cfg.omega_max);
    read_key(t, "omega_step", cfg.omega_step);
    read_key(t, "omega", cfg.omega);
    read_key(t, "modes", cfg.modes);
    read_key(t, "method", cfg.method);
    read_key(t, "homogeneous", cfg.homogeneous);
  }
  if (j.contains("output")) {
    const auto &o = j.at("output");
    read_key(o, "path", cfg.output);
    read_key(o, "format", cfg.format);
  }
  if (j.contains("units")) {
    const auto &u = j.at("units");
    std::string length = cfg.reduced_length ? "reduced" : "physical";
    std::string frequency = cfg.reduced_frequency ? "reduced" : "physical";
    read_key(u, "length", length);
    read_key(u, "frequency", frequency);
    if ((length != "reduced" && length != "physical") || (frequency != "reduced" && frequency != "physical"))
      throw DomainError("units.length and units.frequency must be \"reduced\" or \"physical\"");
    cfg.reduced_length = length == "reduced";
    cfg.reduced_frequency = frequency == "reduced";
  }
}

template <class T> void take(T &dst, const std::optional<T> &src) {
  if (src)
    dst = *src;
}

RunConfig build_config(const Overrides &ov) {
  RunConfig cfg;
  if (!ov.config_path.empty()) {
    std::ifstream in(ov.config_path);
    if (!in)
      throw IoError("cannot open config file " + ov.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception &e) {
      throw DomainError(std::string("invalid config file: ") + e.what());
    }
    try {
      apply_json(cfg, j);
    } catch (const json::exception &e) {
      throw DomainError(std::string("invalid config value: ") + e.what());
    }
  }
  take(cfg.model.vtilde_c, ov.vc);
  take(cfg.model.omega_l, ov.omega_l);
  take(cfg.model.l_fermi, ov.l_fermi);
  take(cfg.model.hbar, ov.hbar);
  if (ov.n_fermions)
    cfg.n_fermions = ov.n_fermions;
  if (ov.alpha)
    cfg.alpha = ov.alpha;
  take(cfg.n_max, ov.n_max);
  take(cfg.homogeneous_n_max, ov.homogeneous_n_max);
  take(cfg.quad_order, ov.quad_order);
  take(cfg.nodes, ov.nodes);
  take(cfg.eta, ov.eta);
  take(cfg.gamma, ov.gamma);
  if (ov.dt)
    cfg.dt = ov.dt;
  take(cfg.delta, ov.delta);
  take(cfg.z, ov.z);
  take(cfg.z0, ov.z0);
  take(cfg.omega_min, ov.omega_min);
  take(cfg.omega_max, ov.omega_max);
  take(cfg.omega_step, ov.omega_step);
  take(cfg.omega, ov.omega);
  take(cfg.modes, ov.modes);
  take(cfg.method, ov.method);
  cfg.homogeneous = cfg.homogeneous || ov.homogeneous;
  take(cfg.output, ov.output);
  take(cfg.format, ov.format);

  if (cfg.n_fermions.has_value() != cfg.alpha.has_value())
    throw DomainError("N and alpha must be given together");
  if (cfg.n_fermions)
    cfg.model.l_fermi = fermi_scales(*cfg.n_fermions, *cfg.alpha).l_fermi;
  validate(cfg.model);
  if (cfg.format != "csv" && cfg.format != "json")
    throw DomainError("output format must be csv or json");
  return cfg;
}

std::size_t thread_count() {
  const char *env = std::getenv("TRAP_KOHN_THREADS");
  if (!env || !*env)
    return 0;
  char *end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0)
    throw DomainError("TRAP_KOHN_THREADS must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

/// Output sink: stdout for "-" or empty, otherwise a file.
class Sink {
public:
  explicit Sink(const std::string &path) {
    if (path.empty() || path == "-")
      return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_)
      throw IoError("cannot open output file " + path);
  }
  std::ostream &stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream())
      throw IoError("write failed");
  }

private:
  std::unique_ptr<std::ofstream> file_;
};

void add_model_options(CLI::App *cmd, Overrides &ov) {
  cmd->add_option("--config", ov.config_path, "JSON config file (model/numerics/task/output/units)");
  cmd->add_option("--vc", ov.vc, "coupling vtilde_c, |vc| < 1 (default 0)");
  cmd->add_option("--omega-l", ov.omega_l, "trap frequency (default 1)");
  cmd->add_option("--lf", ov.l_fermi, "Fermi-sea half-length L_F (default 1)");
  cmd->add_option("--hbar", ov.hbar, "action unit (default 1)");
  cmd->add_option("--N", ov.n_fermions, "fermion number (with --alpha, sets L_F = sqrt(2N)/alpha)");
  cmd->add_option("--alpha", ov.alpha, "inverse oscillator length");
  cmd->add_option("-o,--output", ov.output, "output path, - for stdout (default -)");
  cmd->add_option("--format", ov.format, "csv or json (default csv)");
}

void print_constants(const RunConfig &cfg, std::ostream &os, bool &ok) {
  const DerivedConstants dc = derive_constants(cfg.model);
  const IdentityResiduals r = check_identities(dc, cfg.model);
  ok = dc.eps_form_residual < 1e-10 && r.max() < 1e-10;
  std::optional<FermiScales> fs;
  if (cfg.n_fermions)
    fs = fermi_scales(*cfg.n_fermions, *cfg.alpha);
  if (cfg.format == "json") {
    nlohmann::ordered_json j = io::params_json(cfg.model, dc);
    j["residual_eps_forms"] = dc.eps_form_residual;
    j["residual_kohn_closure"] = r.kohn_closure;
    j["residual_eps_k"] = r.eps_times_k;
    if (fs)
      j["k_fermi"] = fs->k_fermi;
    j["ok"] = ok;
    os << j.dump(2) << '\n';
    return;
  }
  os << "K=" << io::format_double(dc.k_lutt) << '\n'
     << "eps=" << io::format_double(dc.eps_tilde / cfg.frequency_unit()) << '\n'
     << "residual_eps_forms=" << io::format_double(dc.eps_form_residual) << '\n'
     << "residual_kohn_closure=" << io::format_double(r.kohn_closure) << '\n'
     << "residual_eps_k=" << io::format_double(r.eps_times_k) << '\n';
  if (fs)
    os << "l_fermi=" << io::format_double(fs->l_fermi) << '\n'
       << "k_fermi=" << io::format_double(fs->k_fermi) << '\n';
}

int cmd_constants(const Overrides &ov) {
  const RunConfig cfg = build_config(ov);
  Sink sink(cfg.output);
  bool ok = false;
  print_constants(cfg, sink.stream(), ok);
  sink.finish();
  return ok ? 0 : kExitCheckFailed;
}

std::vector<double> frequency_grid(const RunConfig &cfg) {
  if (!(cfg.omega_step > 0.0) || !(cfg.omega_max >= cfg.omega_min))
    throw DomainError("frequency grid needs omega_step > 0 and omega_max >= omega_min");
  const double unit = cfg.frequency_unit();
  const auto count = static_cast<std::size_t>(std::floor((cfg.omega_max - cfg.omega_min) / cfg.omega_step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = (cfg.omega_min + cfg.omega_step * static_cast<double>(k)) * unit;
  return grid;
}

int cmd_mobility(const Overrides &ov) {
  const RunConfig cfg = build_config(ov);
  const double lu = cfg.length_unit();
  const double fu = cfg.frequency_unit();
  const double z = cfg.z * lu;
  const double z0 = cfg.z0 * lu;
  const auto grid = frequency_grid(cfg);
  const std::size_t threads = thread_count();

  MobilitySpectrum spec;
  bool with_rel_diff = false;
  if (cfg.homogeneous) {
    const DerivedConstants dc = derive_constants(cfg.model);
    spec = MobilitySpectrum{cfg.model, dc, std::vector<MobilitySample>(grid.size())};
    parallel_for(grid.size(), threads, [&](std::size_t k) {
      MobilitySample &s = spec.samples[k];
      s.z = z;
      s.z0 = z;
      s.freq = ComplexFrequency(grid[k], cfg.eta * fu);
      s.method = Method::homogeneous_quadrature;
      s.value = mobility_homogeneous_quadrature(z, s.freq, cfg.model, dc, cfg.quad_order, cfg.homogeneous_n_max);
      const cplx exact = mobility_homogeneous_analytic(z, s.freq, cfg.model, dc);
      s.rel_diff = exact == cplx{} ? std::abs(s.value) : std::abs(s.value - exact) / std::abs(exact);
    });
    with_rel_diff = true;
    double worst = 0.0;
    for (const auto &s : spec.samples)
      worst = std::max(worst, *s.rel_diff);
    std::cerr << "homogeneous: max relative deviation from the Kohn form = " << io::format_double(worst) << '\n';
  } else {
    SpectrumOptions opt;
    opt.eta = cfg.eta * fu;
    opt.n_max = cfg.n_max;
    opt.threads = threads;
    if (cfg.method == "mode_sum")
      opt.route = SpectrumOptions::Route::mode_sum;
    else if (cfg.method == "closed_form")
      opt.route = SpectrumOptions::Route::closed_form;
    else if (cfg.method == "compare")
      opt.route = SpectrumOptions::Route::compare;
    else
      throw DomainError("method must be mode_sum, closed_form or compare");
    with_rel_diff = opt.route == SpectrumOptions::Route::compare;
    spec = mobility_spectrum(z, z0, grid, cfg.model, opt);
    if (opt.route != SpectrumOptions::Route::mode_sum) {
      std::size_t flagged = 0;
      for (const auto &s : spec.samples)
        flagged += s.near_pole ? 1 : 0;
      if (flagged)
        std::cerr << "note: " << flagged << " near-pole rows reported from the mode sum\n";
    }
  }

  Sink sink(cfg.output);
  if (cfg.format == "json")
    sink.stream() << io::to_json(spec).dump(2) << '\n';
  else
    io::write_csv(sink.stream(), spec, with_rel_diff, fu);
  sink.finish();
  return 0;
}

std::pair<int, int> parse_mode_range(const std::string &text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int m = std::stoi(text);
      return {m, m};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception &) {
    throw DomainError("mode range must look like 3 or 1..4, got " + text);
  }
}

int cmd_bogoliubov(const Overrides &ov) {
  const RunConfig cfg = build_config(ov);
  const auto [lo, hi] = parse_mode_range(cfg.modes);
  if (lo < 1 || hi < lo)
    throw DomainError("mode range must satisfy 1 <= first <= last");
  const double fu = cfg.frequency_unit();
  const oracle::KohnScheme schemes[] = {oracle::KohnScheme::none, oracle::KohnScheme::project_out,
                                        oracle::KohnScheme::renormalize_trap};
  std::vector<oracle::BogoliubovResult> rows;
  for (auto s : schemes)
    for (int m = lo; m <= hi; ++m)
      rows.push_back(oracle::bogoliubov_mode(m, cfg.model, s));

  Sink sink(cfg.output);
  auto &os = sink.stream();
  if (cfg.format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &r : rows) {
      nlohmann::ordered_json j;
      j["m"] = r.mode_index;
      j["scheme"] = std::string(oracle::to_string(r.scheme));
      j["frequency"] = r.frequency / fu;
      j["squeeze_param"] = r.squeeze_param;
      arr.push_back(j);
    }
    os << arr.dump(2) << '\n';
  } else {
    os << "m,scheme,frequency,squeeze_param\n";
    for (const auto &r : rows)
      os << r.mode_index << ',' << oracle::to_string(r.scheme) << ',' << io::format_double(r.frequency / fu) << ','
         << io::format_double(r.squeeze_param) << '\n';
  }
  sink.finish();
  return 0;
}

int cmd_kohn_residual(const Overrides &ov) {
  const RunConfig cfg = build_config(ov);
  const DerivedConstants dc = derive_constants(cfg.model);
  const UniformGrid grid(cfg.nodes);
  const double coarse = oracle::kohn_mode_residual(cfg.model, dc, grid);
  const double fine = oracle::kohn_mode_residual(cfg.model, dc, grid.refined());
  const bool ok = coarse < 1e-3;
  Sink sink(cfg.output);
  sink.stream() << "nodes=" << grid.interior() << '\n'
                << "residual=" << io::format_double(coarse) << '\n'
                << "residual_half_h=" << io::format_double(fine) << '\n'
                << "ratio=" << io::format_double(coarse / fine) << '\n'
                << (ok ? "PASS" : "FAIL") << '\n';
  sink.finish();
  return ok ? 0 : kExitCheckFailed;
}

oracle::DeltaKind parse_delta(const std::string &name) {
  if (name == "nearest_node")
    return oracle::DeltaKind::nearest_node;
  if (name == "linear_split")
    return oracle::DeltaKind::linear_split;
  throw DomainError("delta must be nearest_node or linear_split");
}

int cmd_timedomain(const Overrides &ov) {
  const RunConfig cfg = build_config(ov);
  const DerivedConstants dc = derive_constants(cfg.model);
  const double lu = cfg.length_unit();
  const double fu = cfg.frequency_unit();
  const double z = cfg.z * lu;
  const double z0 = cfg.z0 * lu;
  const double omega = cfg.omega * fu;
  const double gamma = cfg.gamma * fu;
  const UniformGrid grid(cfg.nodes);
  const double dt = cfg.dt ? *cfg.dt / fu : oracle::cfl_limit(grid, dc);

  oracle::TimeDomainOptions opt;
  opt.delta = parse_delta(cfg.delta);
  const auto sim = oracle::timedomain_mobility(z, z0, omega, gamma, cfg.model, dc, grid, dt, opt);
  const cplx exact = mobility_modesum(z, z0, ComplexFrequency(omega, 0.0, gamma), cfg.model, dc, cfg.n_max);
  const double amp_err = std::abs(std::abs(sim.mobility) / std::abs(exact) - 1.0);
  const double phase_err = std::abs(std::arg(sim.mobility / exact)) * 180.0 / std::numbers::pi;
  const bool ok = amp_err < 0.01 && phase_err < 2.0;

  if (!ov.trajectory.empty()) {
    oracle::ForceSpec force;
    force.z0 = z0;
    force.omega = omega;
    force.gamma = gamma;
    force.amplitude = opt.amplitude;
    force.ramp_time = opt.ramp_decay_times / gamma;
    force.delta = opt.delta;
    const auto traj = oracle::integrate_phase_field(oracle::PhaseField(grid), &force, cfg.model, dc, dt,
                                                    opt.run_decay_times / gamma, ov.stride);
    std::vector<std::size_t> probes = ov.probes;
    if (probes.empty())
      probes.push_back(grid.size() / 2);
    std::ofstream out(ov.trajectory, std::ios::binary);
    if (!out)
      throw IoError("cannot open trajectory file " + ov.trajectory);
    io::write_trajectory_csv(out, traj, probes);
    if (!out.flush())
      throw IoError("write failed for " + ov.trajectory);
  }

  Sink sink(cfg.output);
  auto &os = sink.stream();
  os << "analytic_re=" << io::format_double(exact.real()) << '\n'
     << "analytic_im=" << io::format_double(exact.imag()) << '\n'
     << "simulated_re=" << io::format_double(sim.mobility.real()) << '\n'
     << "simulated_im=" << io::format_double(sim.mobility.imag()) << '\n'
     << "amplitude_rel_error=" << io::format_double(amp_err) << '\n'
     << "phase_error_deg=" << io::format_double(phase_err) << '\n'
     << "fit_residual=" << io::format_double(sim.fit_residual) << '\n'
     << "steps=" << sim.steps << '\n'
     << (ok ? "PASS" : "FAIL") << " (tolerance 1% amplitude, 2 deg phase)\n";
  sink.finish();
  return ok ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Linear mobility of harmonically trapped 1D fermions (bosonized phase model)"};
  app.require_subcommand(1);
  Overrides ov;
  int (*action)(const Overrides &) = nullptr;

  auto *constants = app.add_subcommand("constants", "Luttinger parameter, renormalized frequency and identity residuals");
  add_model_options(constants, ov);
  constants->callback([&] { action = cmd_constants; });

  auto *mobility = app.add_subcommand("mobility", "Mobility spectrum mu(z, z0; omega) as CSV or JSON");
  add_model_options(mobility, ov);
  mobility->add_option("--z", ov.z, "probe position in units of L_F (default 0)");
  mobility->add_option("--z0", ov.z0, "force position in units of L_F (default 0)");
  mobility->add_option("--omega-min", ov.omega_min, "first frequency, units of omega_l (default 0.05)");
  mobility->add_option("--omega-max", ov.omega_max, "last frequency (default 3.5)");
  mobility->add_option("--omega-step", ov.omega_step, "frequency step (default 0.005)");
  mobility->add_option("--eta", ov.eta, "shift into the upper half plane, units of omega_l (default 1e-6)");
  mobility->add_option("--n-max", ov.n_max, "modes in the mode sum (default 10000)");
  mobility->add_option("--method", ov.method, "mode_sum, closed_form, or compare (default mode_sum)");
  mobility->add_flag("--homogeneous", ov.homogeneous, "average over z0 and compare with the Kohn form");
  mobility->add_option("--quad-order", ov.quad_order, "Gauss-Legendre points per panel (default 64)");
  mobility->add_option("--homogeneous-n-max", ov.homogeneous_n_max, "modes in the averaged mode sum (default 2000)");
  mobility->callback([&] { action = cmd_mobility; });

  auto *oracle_cmd = app.add_subcommand("oracle", "Independent numerical cross-checks");
  oracle_cmd->require_subcommand(1);

  auto *bog = oracle_cmd->add_subcommand("bogoliubov", "Bogoliubov mode frequencies per Kohn scheme");
  add_model_options(bog, ov);
  bog->add_option("--m", ov.modes, "mode or range, e.g. 3 or 1..4 (default 1..4)");
  bog->callback([&] { action = cmd_bogoliubov; });

  auto *kohn = oracle_cmd->add_subcommand("kohn-residual", "Residual of the Kohn mode in the discretized phase operator");
  add_model_options(kohn, ov);
  kohn->add_option("--nodes", ov.nodes, "interior grid nodes (default 511)");
  kohn->callback([&] { action = cmd_kohn_residual; });

  auto *td = oracle_cmd->add_subcommand("timedomain", "Driven damped simulation vs damped analytic mobility");
  add_model_options(td, ov);
  td->add_option("--z", ov.z, "probe position in units of L_F");
  td->add_option("--z0", ov.z0, "force position in units of L_F");
  td->add_option("--omega", ov.omega, "drive frequency, units of omega_l (default 0.5)");
  td->add_option("--gamma", ov.gamma, "damping rate, units of omega_l (default 0.05)");
  td->add_option("--nodes", ov.nodes, "interior grid nodes (default 511)");
  td->add_option("--dt", ov.dt, "time step in units of 1/omega_l (default CFL limit 0.5 h / eps)");
  td->add_option("--delta", ov.delta, "point-force discretization: linear_split or nearest_node (default linear_split)");
  td->add_option("--n-max", ov.n_max, "modes in the analytic comparison sum (default 10000)");
  td->add_option("--trajectory", ov.trajectory, "write phi at probe nodes over time to this CSV file");
  td->add_option("--probes", ov.probes, "grid node indices for --trajectory (default middle node)");
  td->add_option("--stride", ov.stride, "steps between trajectory rows (default 10)");
  td->callback([&] { action = cmd_timedomain; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitDomain;
  }

  try {
    return action(ov);
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DomainError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const IntegrationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "trapkohn/trapkohn.hpp"

using namespace trapkohn;
using namespace trapkohn::oracle;
using std::numbers::pi;

namespace {

int failures = 0;

class Criterion {
public:
  Criterion(int id, std::string title, double time_limit_s)
      : id_(id), title_(std::move(title)), limit_(time_limit_s), start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string &detail) {
    ok_ = ok_ && ok;
    if (!ok)
      std::printf("    fail: %s\n", detail.c_str());
  }
  void note(const std::string &detail) { detail_ = detail; }

  ~Criterion() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (limit_ > 0.0 && secs > limit_) {
      ok_ = false;
      std::printf("    fail: runtime %.2f s exceeds %.0f s\n", secs, limit_);
    }
    if (!ok_)
      ++failures;
    std::printf("[%s] %d %s: %s (%.2f s)\n", ok_ ? "PASS" : "FAIL", id_, title_.c_str(), detail_.c_str(), secs);
    std::fflush(stdout);
  }

private:
  int id_;
  std::string title_;
  double limit_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(const char *f, double a) {
  std::array<char, 128> b{};
  std::snprintf(b.data(), b.size(), f, a);
  return b.data();
}

std::string fmt(const char *f, double a, double c) {
  std::array<char, 160> b{};
  std::snprintf(b.data(), b.size(), f, a, c);
  return b.data();
}

struct Model {
  ModelParams p;
  DerivedConstants dc;
  explicit Model(double v) {
    p.vtilde_c = v;
    dc = derive_constants(p);
  }
};

double eigen_residual(long n, double omega, const Model &m, const UniformGrid &g) {
  const auto phi = GridField<double>::sample(g, [n](double u) { return basis_fn(ModeIndex(n), u); });
  const auto out = apply_L(omega, phi, m.dc, m.p);
  const double lam = eigenvalue_sq(ModeIndex(n), omega, m.dc, m.p);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    r = std::max(r, std::abs(out[i] + lam * phi[i]));
  return r / phi.max_norm();
}

bool far_from_poles(double omega, const DerivedConstants &dc, const ModelParams &p, double gap) {
  if (std::abs(omega - p.omega_l) < gap)
    return false;
  for (int n = 2; n * dc.eps_tilde < omega + 1.0; ++n)
    if (std::abs(omega - n * dc.eps_tilde) < gap)
      return false;
  return true;
}

std::string run_cli(const std::string &args, int &code) {
  const std::string cmd = std::string(TRAPKOHN_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), n);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void identity_suite() {
  Criterion c(1, "identity suite", 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Model m(-0.95 + 1.9 * (k + 0.5) / 100.0);
    worst = std::max({worst, m.dc.eps_form_residual, check_identities(m.dc, m.p).max()});
  }
  c.check(worst < 1e-12, "max residual " + fmt("%.3e", worst));
  c.note("100 couplings, max residual " + fmt("%.3e", worst) + " < 1e-12");
}

void eigen_suite() {
  Criterion c(2, "eigen suite", 10.0);
  double worst_final = 0.0;
  for (long n : {1L, 2L, 3L, 5L}) {
    double n_final = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
    for (double v : {0.0, 0.3, 0.6}) {
      const Model m(v);
      for (double omega : {0.0, 0.5, 1.7}) {
        const double coarse = eigen_residual(n, omega, m, UniformGrid(512));
        const double fine = eigen_residual(n, omega, m, UniformGrid(1024));
        const double ratio = coarse / fine;
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
        n_final = std::max(n_final, fine);
        c.check(std::abs(ratio - 4.0) <= 0.3,
                "n=" + std::to_string(n) + fmt(" V=%.1f omega=%.1f", v, omega) + fmt(" ratio %.4f", ratio));
        c.check(fine < 1e-4, "n=" + std::to_string(n) + fmt(" V=%.1f omega=%.1f", v, omega) +
                                 fmt(" residual at 1024 nodes %.3e >= 1e-4", fine));
      }
    }
    std::printf("    n=%ld: ratio in [%.4f, %.4f], residual at 1024 nodes <= %.3e\n", n, ratio_lo, ratio_hi,
                n_final);
    worst_final = std::max(worst_final, n_final);
  }
  c.note("convergence ratio 4 +- 0.3, max residual at 1024 nodes " + fmt("%.3e", worst_final) + " (tol 1e-4)");
}

void closed_form_equivalence() {
  Criterion c(3, "closed-form equivalence", 30.0);
  std::mt19937_64 rng(20240615);
  std::uniform_real_distribution<double> dz(-0.95, 0.95), dv(-0.9, 0.9), dw(0.05, 3.5);
  double worst = 0.0;
  int accepted = 0;
  while (accepted < 50) {
    const double z = dz(rng), z0 = dz(rng), v = dv(rng), omega = dw(rng);
    const Model m(v);
    if (!far_from_poles(omega, m.dc, m.p, 0.05))
      continue;
    ++accepted;
    const ComplexFrequency f(omega, kDefaultEtaRel);
    const cplx closed = mobility_closed(z, z0, f, m.p, m.dc);
    const cplx sum = mobility_modesum(z, z0, f, m.p, m.dc, 100000);
    const double rel = std::abs(closed - sum) / std::abs(closed);
    worst = std::max(worst, rel);
    c.check(rel < 1e-5, fmt("z=%.3f z0=%.3f", z, z0) + fmt(" V=%.3f omega=%.3f", v, omega) + fmt(" rel %.3e", rel));
  }
  c.note("50 random tuples, max relative difference " + fmt("%.3e", worst) + " < 1e-5");
}

void exact_values() {
  Criterion c(4, "exact values", 0.0);
  const Model m(0.0);
  const ComplexFrequency f(0.5, 0.0);
  const cplx target{0.0, -1.0 / (2.0 * pi)};
  const double e_closed = std::abs(mobility_closed(0.0, 0.0, f, m.p, m.dc) - target);
  const double e_sum = std::abs(mobility_modesum(0.0, 0.0, f, m.p, m.dc, 100000000) - target);
  const cplx htarget{0.0, -2.0 / (3.0 * pi) * m.p.l_fermi / m.p.hbar};
  const double e_hom = std::abs(mobility_homogeneous_quadrature(0.0, f, m.p, m.dc) - htarget);
  const double e_hom_a = std::abs(mobility_homogeneous_analytic(0.0, f, m.p, m.dc) - htarget);
  c.check(e_closed < 1e-8, fmt("closed form error %.3e", e_closed));
  c.check(e_sum < 1e-8, fmt("mode sum (1e8 modes) error %.3e", e_sum));
  c.check(e_hom < 1e-8, fmt("homogeneous quadrature error %.3e", e_hom));
  c.check(e_hom_a < 1e-8, fmt("homogeneous analytic error %.3e", e_hom_a));
  c.note("mu(0,0;0.5) err " + fmt("%.2e (closed), %.2e (1e8 modes)", e_closed, e_sum) +
         "; homogeneous err " + fmt("%.2e (quadrature), %.2e (analytic)", e_hom, e_hom_a) + "; tol 1e-8");
}

void kohn_theorem() {
  Criterion c(5, "Kohn theorem", 60.0);
  const std::array<std::pair<double, double>, 10> points{{{0.0, 0.5},
                                                          {0.3, 0.5},
                                                          {-0.6, 0.8},
                                                          {0.8, 1.3},
                                                          {-0.2, 1.7},
                                                          {0.5, 2.1},
                                                          {-0.9, 2.5},
                                                          {0.1, 2.9},
                                                          {0.65, 3.3},
                                                          {-0.45, 0.2}}};
  double worst = 0.0, worst_spread = 0.0;
  for (const auto &[z, omega] : points) {
    const ComplexFrequency f(omega, 0.0);
    std::vector<cplx> values;
    for (double v : {0.0, 0.3, 0.6, -0.4}) {
      const Model m(v);
      const cplx quad = mobility_homogeneous_quadrature(z, f, m.p, m.dc);
      const cplx exact = mobility_homogeneous_analytic(z, f, m.p, m.dc);
      const double rel = std::abs(quad - exact) / std::abs(exact);
      worst = std::max(worst, rel);
      c.check(rel < 1e-6, fmt("z=%.2f omega=%.2f", z, omega) + fmt(" V=%.1f rel %.3e", v, rel));
      values.push_back(quad);
    }
    for (const cplx &a : values)
      for (const cplx &b : values)
        worst_spread = std::max(worst_spread, std::abs(a - b) / std::abs(values[0]));
  }
  c.check(worst_spread < 1e-6, fmt("spread across couplings %.3e", worst_spread));
  c.note("10 points x 4 couplings, max rel error " + fmt("%.3e", worst) + ", spread " + fmt("%.3e", worst_spread) +
         " (tol 1e-6)");
}

void kohn_violation() {
  Criterion c(6, "Kohn violation without subtraction", 0.0);
  double worst = 0.0;
  for (double v : {-0.8, -0.4, 0.0, 0.3, 0.6, 0.9}) {
    Model m(v);
    m.p.omega_l = 1.7;
    const double none = bogoliubov_mode(1, m.p, KohnScheme::none).frequency;
    const double proj = bogoliubov_mode(1, m.p, KohnScheme::project_out).frequency;
    const double renorm = bogoliubov_mode(1, m.p, KohnScheme::renormalize_trap).frequency;
    const double e_none = std::abs(none - m.p.omega_l * std::sqrt(1.0 - v * v)) / m.p.omega_l;
    const double e_proj = std::abs(proj - m.p.omega_l) / m.p.omega_l;
    const double e_renorm = std::abs(renorm - m.p.omega_l) / m.p.omega_l;
    worst = std::max({worst, e_none, e_proj, e_renorm});
    c.check(e_none < 1e-14 && e_proj < 1e-14 && e_renorm < 1e-14,
            fmt("V=%.1f worst %.3e", v, std::max({e_none, e_proj, e_renorm})));
  }
  c.note("none -> omega_l sqrt(1-V^2), project_out/renormalize_trap -> omega_l, max rel error " +
         fmt("%.3e", worst) + " (machine precision 1e-14)");
}

void resonance_positions() {
  Criterion c(7, "resonance positions", 0.0);
  const Model m(0.6);
  std::vector<double> grid;
  const double step = 0.005;
  for (int k = 0; k <= 690; ++k)
    grid.push_back(0.05 + step * k);
  const auto peaks = resonance_scan(0.2, 0.45, grid, m.p, m.dc, 1e-3, kDefaultModes, 0);
  auto has_peak = [&](const std::vector<double> &pk, double target) {
    return std::any_of(pk.begin(), pk.end(), [&](double w) { return std::abs(w - target) <= step * (1 + 1e-9); });
  };
  std::string found;
  for (double target : {1.0, 1.6, 2.4, 3.2}) {
    c.check(has_peak(peaks, target), fmt("no peak within one step of %.2f", target));
    found += fmt(" %.2f", target);
  }
  const auto centre = resonance_scan(0.0, 0.0, grid, m.p, m.dc, 1e-3, kDefaultModes, 0);
  for (double even : {1.6, 3.2})
    c.check(!has_peak(centre, even), fmt("even peak at %.2f present for z = z0 = 0", even));
  c.check(has_peak(centre, 1.0) && has_peak(centre, 2.4), "odd peaks missing for z = z0 = 0");
  c.note(std::to_string(peaks.size()) + " peaks at z=0.2,z0=0.45 matching" + found + "; none at 2eps, 4eps for z=z0=0");
}

void timedomain_cross_validation() {
  Criterion c(8, "time-domain cross-validation", 300.0);
  struct Point {
    double v, z, z0, omega;
  };
  const std::array<Point, 6> points{{{0.0, 0.0, 0.0, 0.5},
                                     {0.6, 0.2, 0.45, 1.1},
                                     {0.3, -0.3, 0.6, 1.3},
                                     {0.6, 0.1, -0.5, 2.0},
                                     {-0.4, 0.5, 0.2, 0.7},
                                     {0.6, 0.7, 0.3, 0.5}}};
  const double gamma = kDefaultGammaRel;
  const UniformGrid grid(511);
  TimeDomainOptions opt;
  opt.delta = DeltaKind::linear_split;
  double worst_amp = 0.0, worst_phase = 0.0;
  for (const auto &pt : points) {
    const Model m(pt.v);
    const cplx exact = mobility_modesum(pt.z, pt.z0, ComplexFrequency(pt.omega, 0.0, gamma), m.p, m.dc, 100000);
    const auto sim = timedomain_mobility(pt.z, pt.z0, pt.omega, gamma, m.p, m.dc, grid, cfl_limit(grid, m.dc), opt);
    const double amp = std::abs(std::abs(sim.mobility) / std::abs(exact) - 1.0);
    const double phase = std::abs(std::arg(sim.mobility / exact)) * 180.0 / pi;
    worst_amp = std::max(worst_amp, amp);
    worst_phase = std::max(worst_phase, phase);
    c.check(amp < 0.01 && phase < 2.0, fmt("V=%.1f omega=%.2f", pt.v, pt.omega) + fmt(" amp %.3e phase %.3f deg", amp, phase));
  }

  // Free evolution of the Kohn mode and of the lowest collective mode.
  const Model m(0.6);
  const UniformGrid g(255);
  const double dt = cfl_limit(g, m.dc);
  auto measure = [&](int n, double probe_u) {
    const auto init = PhaseField::from_functions(g, [n](double u) { return std::sin(n * u); },
                                                 [](double) { return 0.0; });
    std::vector<double> t, x;
    integrate_phase_field(init, nullptr, m.p, m.dc, dt, 60.0, [&](const PhaseField &f) {
      t.push_back(f.time);
      x.push_back(n == 1 ? center_of_mass(f, 1.0) : PhaseField::interpolate(f.phi, f.grid, probe_u));
    });
    return zero_crossing_frequency(t, x);
  };
  const double kohn = measure(1, 0.0);
  const double two_eps = measure(2, -pi / 4);
  const double e_kohn = std::abs(kohn / m.p.omega_l - 1.0);
  const double e_two = std::abs(two_eps / (2.0 * m.dc.eps_tilde) - 1.0);
  c.check(e_kohn < 1e-3, fmt("Kohn frequency %.8f rel err %.3e", kohn, e_kohn));
  c.check(e_two < 1e-3, fmt("2eps frequency %.8f rel err %.3e", two_eps, e_two));
  c.note("6 driven points: max amp err " + fmt("%.2e, max phase err %.4f deg", worst_amp, worst_phase) +
         " (tol 1%, 2 deg); free omega_l err " + fmt("%.2e, 2eps err %.2e (tol 1e-3)", e_kohn, e_two));
}

void determinism() {
  Criterion c(9, "determinism", 0.0);
  const std::array<std::string, 4> commands{
      "constants --vc 0.37",
      "mobility --vc 0.6 --z 0.2 --z0 0.45 --omega-min 0.05 --omega-max 3.5 --omega-step 0.005 --method compare",
      "mobility --vc -0.4 --homogeneous --z 0.3 --omega-min 0.1 --omega-max 2 --omega-step 0.1 --format json",
      "oracle bogoliubov --vc 0.6 --m 1..6 --format json"};
  for (const auto &cmd : commands) {
    int a_code = 0, b_code = 0;
    const std::string a = run_cli(cmd, a_code);
    const std::string b = run_cli(cmd, b_code);
    c.check(a_code == 0 && b_code == 0, "exit codes " + std::to_string(a_code) + "/" + std::to_string(b_code) + ": " + cmd);
    c.check(!a.empty() && a == b, "output differs: " + cmd);
  }
  c.note("4 CLI invocations run twice, byte-identical output");
}

} // namespace

int main() {
  identity_suite();
  eigen_suite();
  closed_form_equivalence();
  exact_values();
  kohn_theorem();
  kohn_violation();
  resonance_positions();
  timedomain_cross_validation();
  determinism();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

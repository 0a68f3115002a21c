// cauchyfm: command-line front end.
// Exit codes: 0 success, 1 oracle failure, 2 configuration error, 3 numerical abort.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cauchyfm/cauchyfm.hpp"

namespace fs = std::filesystem;
using namespace cauchyfm;

namespace {

struct CommonFlags {
  std::string config;
  std::string data;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_data) {
  cmd->add_option("--config", f.config, "experiment configuration file")->required();
  if (needs_data) cmd->add_option("--data", f.data, "Cauchy data CSV (default: OUT/cauchy_noisy.csv)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "override data.seed");
  cmd->add_option("--threads", f.threads, "override run.threads");
}

ExperimentConfig load(const CommonFlags& f) {
  ExperimentConfig c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  validate(c);
  fs::create_directories(f.out);
  return c;
}

std::string out_path(const CommonFlags& f, const std::string& name) { return (fs::path(f.out) / name).string(); }

CauchyPair load_data(const CommonFlags& f) { return read_cauchy_pair(f.data.empty() ? out_path(f, "cauchy_noisy.csv") : f.data); }

double resolve_gamma(const GammaSource& g, const CommonFlags& f) {
  return g.from_file ? parse_gamma_hat(read_text(out_path(f, "gamma_hat.csv"))) : g.value;
}

int cmd_selftest(double scale) {
  bool ok = true;
  for (const auto& line : run_selftest(scale)) {
    std::printf("%s %s measured=%.3e tolerance=%.3e\n", line.pass() ? "PASS" : "FAIL", line.name.c_str(), line.measured, line.tolerance);
    ok = ok && line.pass();
  }
  return ok ? 0 : 1;
}

int cmd_synthesize(const CommonFlags& f) {
  const ExperimentConfig c = load(f);
  const std::string hash = config_hash(c);
  const SynthesisResult r = run_synthesize(c);
  write_text(out_path(f, "config.cfg"), serialize(c));
  write_text(out_path(f, "cauchy_clean.csv"), cauchy_pair_csv(r.clean, hash));
  write_text(out_path(f, "cauchy_noisy.csv"), cauchy_pair_csv(r.noisy, hash));
  std::printf("wrote %s and %s (config %s)\n", out_path(f, "cauchy_clean.csv").c_str(), out_path(f, "cauchy_noisy.csv").c_str(), hash.c_str());
  return 0;
}

int cmd_recover_gamma(const CommonFlags& f) {
  const ExperimentConfig c = load(f);
  const std::string hash = config_hash(c);
  const GammaResult r = run_recover_gamma(c, load_data(f));
  write_text(out_path(f, "gamma_scan.csv"), gamma_scan_csv(r.scan, r.estimate, hash));
  write_text(out_path(f, "gamma_hat.csv"), gamma_hat_csv(r.estimate, hash));
  std::printf("gamma_hat=%.17g peak_to_median=%.3e%s\n", r.estimate.gamma_hat, r.estimate.peak_to_median,
              r.estimate.low_confidence ? " (low confidence)" : "");
  return 0;
}

int cmd_locate(const CommonFlags& f) {
  const ExperimentConfig c = load(f);
  const std::string hash = config_hash(c);
  const double gamma_hat = resolve_gamma(c.locate_gamma, f);
  const LocateResult r = run_locate(c, load_data(f), gamma_hat);
  write_text(out_path(f, "locate_approach1.csv"), disk_field_csv(r.approach1, "domain_scan_concentric", hash));
  for (std::size_t k = 0; k < r.approach2.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "locate_grid_r%g.csv", c.grid_radii[k]);
    write_text(out_path(f, name), disk_field_csv(r.approach2[k], "domain_scan_grid", hash));
  }
  std::printf("gamma_hat=%.17g crossover_radius=%.17g\n", gamma_hat, r.crossover);
  return 0;
}

int cmd_newton(const CommonFlags& f) {
  const ExperimentConfig c = load(f);
  const std::string hash = config_hash(c);
  const double gamma_hat = resolve_gamma(c.newton_gamma, f);
  const NewtonState st = run_newton(c, load_data(f), gamma_hat);
  write_text(out_path(f, "newton_history.csv"), newton_history_csv(st, hash));
  if (st.aborted) {
    std::fprintf(stderr, "newton aborted: %s\n", st.abort_reason.c_str());
    return 3;
  }
  const auto& last = st.history.back();
  std::printf("iterations=%zu residual=%.6e%s\n", last.iteration, last.residual, st.converged ? " (converged)" : "");
  for (std::size_t l = 0; l < st.corners.size(); ++l) std::printf("corner %zu: %.6f %.6f\n", l, st.corners[l].x, st.corners[l].y);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy-data reconstruction of a conductivity and a polygonal obstacle"};
  app.require_subcommand(1);

  double tol_scale = 1.0;
  auto* selftest = app.add_subcommand("selftest", "run the oracle suite");
  selftest->add_option("--tolerance-scale", tol_scale, "multiply every oracle tolerance (test hook)")->group("");

  CommonFlags synth_f, gamma_f, locate_f, newton_f;
  auto* synth = app.add_subcommand("synthesize", "generate clean and noisy Cauchy data");
  add_common(synth, synth_f, false);
  auto* gamma = app.add_subcommand("recover-gamma", "conductivity scan and estimate");
  add_common(gamma, gamma_f, true);
  auto* locate = app.add_subcommand("locate", "domain scans with disk families");
  add_common(locate, locate_f, true);
  auto* newton = app.add_subcommand("newton", "regularized Newton refinement of the polygon");
  add_common(newton, newton_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*selftest) return cmd_selftest(tol_scale);
    if (*synth) return cmd_synthesize(synth_f);
    if (*gamma) return cmd_recover_gamma(gamma_f);
    if (*locate) return cmd_locate(locate_f);
    if (*newton) return cmd_newton(newton_f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "geometry error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "file error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  }
  return 2;
}

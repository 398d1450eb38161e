// Command-line front end: phantom generation, reconstruction runs, method
// comparison and the frozen-weight oracle experiment.  All outputs are files;
// exit codes: 0 success, 1 configuration error, 2 numeric abort.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csrecon/config.hpp"
#include "csrecon/io.hpp"
#include "csrecon/phantom.hpp"
#include "csrecon/pipeline.hpp"

namespace fs = std::filesystem;
using namespace csrecon;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_override;
  int seed_override = -1;
  int threads = 1;
  bool test_mode = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config_path, "experiment description file");
  if (config_required) c->required();
  cmd->add_option("--out", f.out_override, "output directory (overrides the config)");
  cmd->add_option("--seed", f.seed_override, "seed override (>= 0)");
  cmd->add_option("--threads", f.threads, "worker threads (reconstructions are single-threaded)");
  cmd->add_flag("--test-mode", f.test_mode, "exact determinism: single thread, fixed plans");
}

ExperimentConfig load_with_overrides(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f.config_path);
  if (!f.out_override.empty()) cfg.out_dir = f.out_override;
  if (f.seed_override >= 0) cfg.seed = std::uint64_t(f.seed_override);
  cfg.test_mode = f.test_mode;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressed-sensing image reconstruction toolkit"};
  app.require_subcommand(1);

  // phantom
  auto* cmd_ph = app.add_subcommand("phantom", "write a test image in the raw float format");
  std::string ph_name = "shepp-logan";
  int ph_n = 128;
  std::string ph_out = "phantom.raw";
  cmd_ph->add_option("name", ph_name, "shepp-logan | piecewise-affine | texture-mix")->required();
  cmd_ph->add_option("n", ph_n, "side length (>= 32)")->required();
  cmd_ph->add_option("--out", ph_out, "output path");

  // reconstruct
  auto* cmd_rec = app.add_subcommand("reconstruct", "run one configured reconstruction");
  CommonFlags rec_flags;
  add_common(cmd_rec, rec_flags, true);

  // compare
  auto* cmd_cmp = app.add_subcommand("compare", "run several configs on one problem");
  std::vector<std::string> cmp_configs;
  std::string cmp_out = "compare_out";
  int cmp_threads = 1;
  bool cmp_test = false;
  cmd_cmp->add_option("--config", cmp_configs, "config files (repeat; >= 2)")
      ->required()
      ->expected(-2);
  cmd_cmp->add_option("--out", cmp_out, "output directory");
  cmd_cmp->add_option("--threads", cmp_threads, "worker threads");
  cmd_cmp->add_flag("--test-mode", cmp_test, "exact determinism");

  // oracle
  auto* cmd_or = app.add_subcommand("oracle", "frozen true-coefficient weight experiment");
  CommonFlags or_flags;
  std::string or_reference;
  add_common(cmd_or, or_flags, true);
  cmd_or->add_option("--reference", or_reference, "reference image overriding the config image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_ph->parsed()) {
      const ImageGrid u = make_phantom(ph_name, ph_n);
      if (!ph_out.empty() && fs::path(ph_out).has_parent_path())
        fs::create_directories(fs::path(ph_out).parent_path());
      write_image(ph_out, u);
      write_pgm(fs::path(ph_out).replace_extension(".pgm").string(), u);
      std::cout << "wrote " << ph_out << "\n";
    } else if (cmd_rec->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(rec_flags);
      const RunResult r = run_reconstruct(cfg);
      std::printf("final_re=%.10f final_ssim=%.10f seconds=%.2f\n", r.final_re, r.final_ssim,
                  r.seconds);
    } else if (cmd_cmp->parsed()) {
      const auto rows = run_compare(cmp_configs, cmp_out, cmp_test);
      for (const auto& row : rows)
        std::printf("%s: re=%.10f ssim=%.10f seconds=%.2f\n", row.name.c_str(), row.re, row.ssim,
                    row.seconds);
    } else if (cmd_or->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(or_flags);
      const auto [log_const, log_ml] = run_oracle(cfg, or_reference, cfg.out_dir);
      std::printf("const: final_re=%.10f\nml-max: final_re=%.10f\n",
                  log_const.empty() ? 0.0 : log_const.back().re,
                  log_ml.empty() ? 0.0 : log_ml.back().re);
    }
  } catch (const NumericAbort& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

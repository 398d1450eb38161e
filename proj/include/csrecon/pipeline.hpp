#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "phantom.hpp"
#include "plot.hpp"
#include "sampling.hpp"
#include "solver.hpp"
#include "transforms.hpp"

namespace csrecon {

inline std::unique_ptr<MultilevelTransform> build_transform(const ExperimentConfig& c) {
  switch (c.transform) {
    case TransformType::none:
      return nullptr;
    case TransformType::wavelet: {
      WaveletKind k = WaveletKind::haar;
      if (c.family == "db2") k = WaveletKind::db2;
      if (c.family == "db4") k = WaveletKind::db4;
      return make_wavelet(k, c.levels, c.n);
    }
    case TransformType::shearlet:
    default: {
      std::vector<int> dirs = c.directions;
      if (dirs.empty()) dirs.assign(size_t(c.levels), 2);
      return make_shearlet(c.levels, std::move(dirs), c.n);
    }
  }
}

inline ImageGrid load_reference(const ExperimentConfig& c) {
  if (c.image == "shepp-logan" || c.image == "piecewise-affine" || c.image == "texture-mix")
    return make_phantom(c.image, c.n);
  ImageGrid u = read_image(c.image);
  if (u.n() != c.n)
    throw ConfigError(c.image + ": image is " + std::to_string(u.n()) + "x" +
                      std::to_string(u.n()) + " but problem.n = " + std::to_string(c.n));
  return u;
}

// Deterministic pixel-keep pattern: a seeded Fisher-Yates pass (explicit
// modulo draw, so the pattern is stable across standard libraries) retains
// exactly round(fraction * n^2) pixels.
inline std::vector<std::uint8_t> make_keep_mask(int n, double fraction, std::uint64_t seed) {
  const size_t total = size_t(n) * n;
  const size_t kept = size_t(std::lround(fraction * double(total)));
  std::vector<std::uint32_t> idx(total);
  for (size_t l = 0; l < total; ++l) idx[l] = std::uint32_t(l);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (size_t i = total - 1; i > 0; --i) {
    const size_t j = size_t(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::uint8_t> keep(total, 0);
  for (size_t l = 0; l < kept; ++l) keep[idx[l]] = 1;
  return keep;
}

struct ProblemSetup {
  std::unique_ptr<SamplingOperator> op;
  RadialMask mask;               // fourier only
  std::vector<std::uint8_t> keep;  // inpaint only
};

inline ProblemSetup build_operator(const ExperimentConfig& c) {
  ProblemSetup s;
  switch (c.kind) {
    case ProblemKind::fourier: {
      if (!c.mask_path.empty()) {
        s.mask = read_mask(c.mask_path);
        if (s.mask.n != c.n)
          throw ConfigError(c.mask_path + ": mask size does not match problem.n");
      } else {
        s.mask = make_radial_mask(c.n, c.lines, c.seed);
      }
      s.op = fourier_operator(s.mask);
      break;
    }
    case ProblemKind::radon: {
      RadonOptions opt;
      opt.step = c.step;
      s.op = radon_operator(c.n, c.angles, opt);
      break;
    }
    case ProblemKind::inpaint: {
      if (!c.mask_path.empty()) {
        const RadialMask m = read_mask(c.mask_path);
        if (m.n != c.n) throw ConfigError(c.mask_path + ": mask size does not match problem.n");
        s.keep = m.mask;
      } else {
        s.keep = make_keep_mask(c.n, c.keep_fraction, c.seed);
      }
      s.op = inpainting_operator(c.n, s.keep);
      break;
    }
  }
  return s;
}

struct RunResult {
  ImageGrid rec;
  ConvergenceLog log;
  double final_re = 0.0;
  double final_ssim = 0.0;
  double seconds = 0.0;
  size_t measurements = 0;
  double sampling_rate = 0.0;
};

// End-to-end single reconstruction: reference image -> measurements ->
// solver -> metrics.  The oracle strategy freezes its weights from the true
// coefficients here, before the solver starts.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const ImageGrid reference = load_reference(cfg);
  const ProblemSetup setup = build_operator(cfg);
  const std::unique_ptr<MultilevelTransform> t = build_transform(cfg);
  const std::vector<cplx> y = setup.op->forward(reference);

  RunResult r;
  if (cfg.iht_requested) {
    auto [rec, log] =
        iht_inpaint(*setup.op, *t, y, cfg.iht_strategy, cfg.iht_value, cfg.iht_epsilon,
                    cfg.iht_sigma, cfg.iht_iters, &reference);
    r.rec = std::move(rec);
    r.log = std::move(log);
  } else {
    SolverConfig sc = cfg.solver;
    if (sc.reweight.kind == StrategyKind::oracle && !sc.reweight.frozen) {
      if (!t) throw ConfigError("oracle strategy needs a transform");
      sc.reweight.frozen = std::make_shared<WeightSchedule>(
          oracle_weights(t->analyze(reference), sc.reweight.epsilon));
    }
    auto [rec, log] = split_bregman_reconstruct(*setup.op, t.get(), y, sc, &reference);
    r.rec = std::move(rec);
    r.log = std::move(log);
  }
  if (cfg.test_mode)
    for (auto& row : r.log) row.seconds = 0.0;
  r.final_re = relative_error(reference, r.rec);
  r.final_ssim = ssim(reference, r.rec);
  r.seconds = r.log.empty() ? 0.0 : r.log.back().seconds;
  r.measurements = setup.op->measurement_count();
  r.sampling_rate = double(r.measurements) / double(size_t(cfg.n) * cfg.n);
  return r;
}

inline void write_summary(const std::string& path, const ExperimentConfig& cfg,
                          const RunResult& r) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << std::fixed << std::setprecision(10);
  os << "kind=" << to_string(cfg.kind) << "\n";
  os << "image=" << cfg.image << "\n";
  os << "n=" << cfg.n << "\n";
  os << "transform=" << to_string(cfg.transform) << "\n";
  os << "mode=" << (cfg.iht_requested ? "iht" : to_string(cfg.solver.mode)) << "\n";
  os << "strategy="
     << (cfg.iht_requested ? (cfg.iht_strategy == IhtStrategy::f1 ? "f1" : "f2")
                           : to_string(cfg.solver.reweight.kind))
     << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "measurements=" << r.measurements << "\n";
  os << "sampling_rate=" << r.sampling_rate << "\n";
  os << "iterations=" << (r.log.empty() ? 0 : r.log.back().iter) << "\n";
  os << "final_re=" << r.final_re << "\n";
  os << "final_ssim=" << r.final_ssim << "\n";
  os << "seconds=" << r.seconds << "\n";
}

// Reconstruction subcommand: writes rec.raw, preview.pgm, log.csv and
// summary.txt into the output directory.
inline RunResult run_reconstruct(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  RunResult r = run_experiment(cfg);

  write_image((fs::path(cfg.out_dir) / "rec.raw").string(), r.rec);
  write_pgm((fs::path(cfg.out_dir) / "preview.pgm").string(), r.rec);
  {
    std::ofstream os(fs::path(cfg.out_dir) / "log.csv");
    if (!os) throw std::runtime_error("cannot open log.csv for writing");
    write_log_csv(os, r.log);
  }
  write_summary((fs::path(cfg.out_dir) / "summary.txt").string(), cfg, r);
  return r;
}

struct CompareRow {
  std::string name;
  double re = 0.0, ssim = 0.0, seconds = 0.0;
};

// Comparison subcommand: runs each config against the shared problem and
// emits comparison.csv plus a two-panel convergence plot.
inline std::vector<CompareRow> run_compare(const std::vector<std::string>& config_paths,
                                           const std::string& out_dir, bool test_mode = false) {
  namespace fs = std::filesystem;
  if (config_paths.size() < 2) throw ConfigError("compare needs at least two configs");

  std::vector<ExperimentConfig> cfgs;
  for (const auto& p : config_paths) {
    cfgs.push_back(load_config(p));
    cfgs.back().test_mode = test_mode;
  }
  const ExperimentConfig& first = cfgs.front();
  for (size_t i = 1; i < cfgs.size(); ++i) {
    const ExperimentConfig& c = cfgs[i];
    const bool same = c.kind == first.kind && c.n == first.n && c.image == first.image &&
                      c.seed == first.seed && c.lines == first.lines &&
                      c.angles == first.angles && c.step == first.step &&
                      c.keep_fraction == first.keep_fraction && c.mask_path == first.mask_path;
    if (!same)
      throw ConfigError(config_paths[i] + ": problem setup differs from " + config_paths[0]);
  }

  fs::create_directories(out_dir);
  std::vector<CompareRow> rows;
  std::vector<PlotSeries> re_series, ssim_series;
  std::ostringstream csv;
  csv.precision(10);
  csv << "name,re,ssim,seconds\n";
  for (size_t i = 0; i < cfgs.size(); ++i) {
    const std::string name = fs::path(config_paths[i]).stem().string();
    RunResult r = run_experiment(cfgs[i]);
    {
      std::ofstream os(fs::path(out_dir) / (name + "_log.csv"));
      write_log_csv(os, r.log);
    }
    PlotSeries sre{name, {}, {}}, sss{name, {}, {}};
    for (const auto& row : r.log) {
      sre.x.push_back(row.iter);
      sre.y.push_back(row.re);
      sss.x.push_back(row.iter);
      sss.y.push_back(row.ssim);
    }
    re_series.push_back(std::move(sre));
    ssim_series.push_back(std::move(sss));
    rows.push_back({name, r.final_re, r.final_ssim, r.seconds});
    csv << name << ',' << r.final_re << ',' << r.final_ssim << ',' << r.seconds << '\n';
  }
  {
    std::ofstream os(fs::path(out_dir) / "comparison.csv");
    if (!os) throw std::runtime_error("cannot open comparison.csv for writing");
    os << csv.str();
  }
  write_plot((fs::path(out_dir) / "convergence.ppm").string(),
             render_convergence_plot(re_series, ssim_series));
  return rows;
}

// Oracle experiment: two solver runs with weights frozen from the true
// coefficients — constant lambda versus per-band max lambda — logged side by
// side for the same measurements and initialization.
inline std::pair<ConvergenceLog, ConvergenceLog> run_oracle(const ExperimentConfig& cfg,
                                                            const std::string& reference_path,
                                                            const std::string& out_dir) {
  namespace fs = std::filesystem;
  ExperimentConfig c = cfg;
  if (!reference_path.empty()) c.image = reference_path;
  const ImageGrid reference = load_reference(c);
  const std::unique_ptr<MultilevelTransform> t = build_transform(c);
  if (!t) throw ConfigError("oracle experiment needs a transform");
  const ProblemSetup setup = build_operator(c);
  const std::vector<cplx> y = setup.op->forward(reference);

  const SubbandStack true_c = t->analyze(reference);
  const double eps = c.solver.reweight.epsilon;

  WeightSchedule flat;
  flat.lambda.assign(true_c.size(), c.solver.reweight.lambda_const);
  flat.lambda[0] = 0.0;
  flat.w = weights_irl1(true_c, eps);
  flat.epsilon = eps;
  flat.tag = StrategyKind::oracle;

  const WeightSchedule ml = oracle_weights(true_c, eps);

  SolverConfig sc = c.solver;
  sc.reweight.kind = StrategyKind::oracle;

  sc.reweight.frozen = std::make_shared<WeightSchedule>(flat);
  auto [rec_a, log_a] = split_bregman_reconstruct(*setup.op, t.get(), y, sc, &reference);

  sc.reweight.frozen = std::make_shared<WeightSchedule>(ml);
  auto [rec_b, log_b] = split_bregman_reconstruct(*setup.op, t.get(), y, sc, &reference);

  if (c.test_mode) {
    for (auto& row : log_a) row.seconds = 0.0;
    for (auto& row : log_b) row.seconds = 0.0;
  }

  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / "oracle_const.csv");
    write_log_csv(os, log_a);
  }
  {
    std::ofstream os(fs::path(out_dir) / "oracle_mlmax.csv");
    write_log_csv(os, log_b);
  }
  std::vector<PlotSeries> re_series, ssim_series;
  PlotSeries ra{"CONST", {}, {}}, rb{"ML-MAX", {}, {}};
  PlotSeries sa{"CONST", {}, {}}, sb{"ML-MAX", {}, {}};
  for (const auto& row : log_a) {
    ra.x.push_back(row.iter);
    ra.y.push_back(row.re);
    sa.x.push_back(row.iter);
    sa.y.push_back(row.ssim);
  }
  for (const auto& row : log_b) {
    rb.x.push_back(row.iter);
    rb.y.push_back(row.re);
    sb.x.push_back(row.iter);
    sb.y.push_back(row.ssim);
  }
  re_series = {ra, rb};
  ssim_series = {sa, sb};
  write_plot((fs::path(out_dir) / "oracle.ppm").string(),
             render_convergence_plot(re_series, ssim_series));
  (void)rec_a;
  (void)rec_b;
  return {std::move(log_a), std::move(log_b)};
}

}  // namespace csrecon

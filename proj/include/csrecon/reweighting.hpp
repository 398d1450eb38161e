#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "transforms.hpp"

namespace csrecon {

// Per-coefficient real planes with the same layout as a SubbandStack.
using WeightPlanes = std::vector<std::vector<double>>;

enum class StrategyKind { none, irl1, ml_max, ml_quantile, co_l1, oracle };

inline const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::none: return "none";
    case StrategyKind::irl1: return "irl1";
    case StrategyKind::ml_max: return "ml-max";
    case StrategyKind::ml_quantile: return "ml-quantile";
    case StrategyKind::co_l1: return "co-l1";
    case StrategyKind::oracle: return "oracle";
  }
  return "?";
}

// The complete weighting state used by one shrink step: per-subband
// compensation factors lambda_j and per-coefficient weights W_j(l).
struct WeightSchedule {
  std::vector<double> lambda;
  WeightPlanes w;
  double epsilon = 0.0;
  StrategyKind tag = StrategyKind::none;
};

// lambda_j = max coefficient modulus of subband j; the lowpass subband gets
// lambda_0 = 0 because its coefficients are dense, not sparse.
inline std::vector<double> lambda_ml_max(const SubbandStack& c) {
  std::vector<double> lam(c.size(), 0.0);
  for (size_t j = 1; j < c.size(); ++j) lam[j] = c[j].max_abs();
  return lam;
}

// Nearest-rank quantile of the coefficient moduli per subband; q = 1
// reproduces lambda_ml_max.  lambda_0 = 0 as above.
inline std::vector<double> lambda_ml_quantile(const SubbandStack& c, double q) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("lambda_ml_quantile: q must be in (0, 1]");
  std::vector<double> lam(c.size(), 0.0);
  std::vector<double> mag;
  for (size_t j = 1; j < c.size(); ++j) {
    mag.resize(c[j].size());
    for (size_t l = 0; l < mag.size(); ++l) mag[l] = std::abs(c[j][l]);
    const size_t rank = size_t(std::ceil(q * double(mag.size())));  // 1-based
    std::nth_element(mag.begin(), mag.begin() + (rank - 1), mag.end());
    lam[j] = mag[rank - 1];
  }
  return lam;
}

// Classical elementwise reweighting: W_j(l) = 1/(eps + |c_j(l)|), every
// subband including the lowpass (whose weights are inert once lambda_0 = 0).
inline WeightPlanes weights_irl1(const SubbandStack& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("weights_irl1: eps must be positive");
  WeightPlanes w(c.size());
  for (size_t j = 0; j < c.size(); ++j) {
    w[j].resize(c[j].size());
    for (size_t l = 0; l < w[j].size(); ++l) w[j][l] = 1.0 / (eps + std::abs(c[j][l]));
  }
  return w;
}

// Subband-level reweighting: lambda_j = N_j/(eps + ||c_j||_1), applied to
// every subband including j = 0.
inline std::vector<double> lambda_co_l1(const SubbandStack& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("lambda_co_l1: eps must be positive");
  std::vector<double> lam(c.size());
  for (size_t j = 0; j < c.size(); ++j) {
    double l1 = 0.0;
    for (size_t l = 0; l < c[j].size(); ++l) l1 += std::abs(c[j][l]);
    lam[j] = double(c[j].size()) / (eps + l1);
  }
  return lam;
}

// Weights frozen from reference coefficients: the multilevel lambda plus
// elementwise weights, never updated from iterates.
inline WeightSchedule oracle_weights(const SubbandStack& true_c, double eps) {
  WeightSchedule s;
  s.lambda = lambda_ml_max(true_c);
  s.w = weights_irl1(true_c, eps);
  s.epsilon = eps;
  s.tag = StrategyKind::oracle;
  return s;
}

// Hard-threshold maps for the iterative hard thresholding solver.  The
// scaling plane (subband 0) always passes through untouched, matching the
// solver convention that the lowpass plane is never sparsified.
// f1: flat lambda over all detail bands, delta = lambda/(|c| + eps).
inline WeightPlanes iht_strategy_f1(const SubbandStack& c, double lambda, double eps) {
  if (lambda < 0.0 || !(eps > 0.0)) throw std::invalid_argument("iht_strategy_f1: bad parameters");
  WeightPlanes d(c.size());
  for (size_t j = 0; j < c.size(); ++j) {
    d[j].resize(c[j].size());
    if (j == 0) {
      std::fill(d[j].begin(), d[j].end(), 0.0);
      continue;
    }
    for (size_t l = 0; l < d[j].size(); ++l) d[j][l] = lambda / (std::abs(c[j][l]) + eps);
  }
  return d;
}

// f2: per-subband compensation, delta = mu * max_j / (|c| + eps), so every
// scale's dominant coefficients see comparable thresholds.
inline WeightPlanes iht_strategy_f2(const SubbandStack& c, double mu, double eps) {
  if (mu < 0.0 || !(eps > 0.0)) throw std::invalid_argument("iht_strategy_f2: bad parameters");
  WeightPlanes d(c.size());
  for (size_t j = 0; j < c.size(); ++j) {
    d[j].resize(c[j].size());
    if (j == 0) {
      std::fill(d[j].begin(), d[j].end(), 0.0);
      continue;
    }
    const double mj = c[j].max_abs();
    for (size_t l = 0; l < d[j].size(); ++l) d[j][l] = mu * mj / (std::abs(c[j][l]) + eps);
  }
  return d;
}

// How the solver should refresh its weights each sweep.
struct ReweightOptions {
  StrategyKind kind = StrategyKind::ml_max;
  double q = 0.75;            // ml-quantile only
  double lambda_const = 1.0;  // none / irl1: flat detail-band lambda
  double epsilon = 1e-4;
  std::shared_ptr<const WeightSchedule> frozen;  // oracle only
};

// Evaluates the configured strategy on the current coefficients.  Flat-
// lambda strategies keep lambda_0 = 0 as well: the lowpass plane is never
// sparsified.
inline WeightSchedule make_schedule(const ReweightOptions& opt, const SubbandStack& current) {
  WeightSchedule s;
  s.epsilon = opt.epsilon;
  s.tag = opt.kind;
  const size_t bands = current.size();
  auto flat_lambda = [&] {
    std::vector<double> lam(bands, opt.lambda_const);
    lam[0] = 0.0;
    return lam;
  };
  auto unit_weights = [&] {
    WeightPlanes w(bands);
    for (size_t j = 0; j < bands; ++j) w[j].assign(current[j].size(), 1.0);
    return w;
  };
  switch (opt.kind) {
    case StrategyKind::none:
      s.lambda = flat_lambda();
      s.w = unit_weights();
      break;
    case StrategyKind::irl1:
      s.lambda = flat_lambda();
      s.w = weights_irl1(current, opt.epsilon);
      break;
    case StrategyKind::ml_max:
      s.lambda = lambda_ml_max(current);
      s.w = weights_irl1(current, opt.epsilon);
      break;
    case StrategyKind::ml_quantile:
      s.lambda = lambda_ml_quantile(current, opt.q);
      s.w = weights_irl1(current, opt.epsilon);
      break;
    case StrategyKind::co_l1:
      s.lambda = lambda_co_l1(current, opt.epsilon);
      s.w = unit_weights();
      break;
    case StrategyKind::oracle:
      if (!opt.frozen) throw std::invalid_argument("oracle strategy requires frozen weights");
      return *opt.frozen;
  }
  return s;
}

}  // namespace csrecon

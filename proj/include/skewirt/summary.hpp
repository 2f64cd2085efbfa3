#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skewirt/sampler.hpp"
#include "skewirt/synthgen.hpp"

namespace skewirt {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Reading aid only; classification is unaffected.
enum class SkewFlag { none, insignificant, clear };
const char* to_string(SkewFlag f);
/// |gamma| < 0.4 -> insignificant, |gamma| > 0.9 -> clear.
SkewFlag skew_flag(double gamma);

struct ItemSummary {
  std::string item_id;
  double post_mean_a = 0.0;
  double post_mean_b = 0.0;
  double post_mean_c = 0.0;
  Interval ci_a, ci_b, ci_c;
  std::array<double, 3> z_probs{};
  /// argmax of z_probs, ties to the lower component index.
  Component classification = Component::symmetric;
  /// Mean of gamma over the draws whose z is the modal component; 0 when that
  /// component is symmetric.
  double gamma_est = 0.0;
  Interval ci_gamma;
  SkewFlag flag = SkewFlag::insignificant;
};

/// Pools draws across chains. Throws std::invalid_argument for no chains,
/// fewer than 2 draws in total, or chains that disagree on the items.
std::vector<ItemSummary> summarize_items(std::span<const DrawStore> stores, double level = 0.95);

/// Posterior mean of each theta_j, pooled across chains.
std::vector<double> posterior_mean_theta(std::span<const DrawStore> stores);

/// Type-7 sample quantile; `values` is sorted in place.
double quantile(std::vector<double>& values, double p);

struct ParameterRecovery {
  std::vector<double> truth;
  std::vector<double> estimate;
  double rmse = 0.0;
  double pearson = 0.0;
};

double rmse(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);

struct RecoveryReport {
  ParameterRecovery a, b, theta;
  /// confusion[truth][estimate] over (symmetric, negative, positive); truth
  /// is the sign of the generating gamma.
  std::array<std::array<std::size_t, 3>, 3> confusion{};
};

/// Throws std::invalid_argument on dimension mismatch.
RecoveryReport recovery_report(std::span<const ItemSummary> items, std::span<const double> theta_mean,
                               const Scenario& truth, std::span<const double> true_theta);

struct ParameterDiagnostic {
  std::string name;
  double ess = 0.0;
  /// NaN when the parameter is constant.
  double rhat = 0.0;
  bool constant = false;
};

struct ChainDiagnostics {
  std::vector<ParameterDiagnostic> parameters;
  std::vector<AcceptanceCounts> acceptance;  // one entry per chain
};

/// Effective sample size from the chain-combined autocorrelation with Geyer's
/// initial monotone sequence. Chains are truncated to the shortest.
double effective_sample_size(std::span<const std::vector<double>> chains);
/// Split-R-hat: every chain halved, then the potential scale reduction.
double split_rhat(std::span<const std::vector<double>> chains);

/// ESS and split-R-hat for a, b, c, gamma, gamma-, gamma+ and w of every item,
/// and for theta when `include_theta`. Throws std::invalid_argument when a
/// chain holds fewer than 4 draws.
ChainDiagnostics diagnostics(std::span<const DrawStore> stores, bool include_theta = false);

}  // namespace skewirt

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewirt/model.hpp"
#include "skewirt/sampler.hpp"

namespace skewirt {

struct DataConfig {
  std::filesystem::path responses;
  std::filesystem::path fixed_c;  // empty unless the model is 3pcsp-fixed-c
  std::vector<std::string> exclude_items;
};

/// Everything a fit needs. Parsed from flat "key = value" text with dotted
/// keys; '#' starts a comment; lists are comma separated:
///
///   model = 2pcsp
///   priors.dirichlet = 0.05, 0.01, 0.01
///   mcmc.iterations = 10000
///   data.responses = responses.csv
///
/// Keys: model; priors.{dirichlet, beta_skew, mu_a, sigma_a, mu_b, sigma_b,
/// beta_guess}; tuning.{tau_gamma_neg, tau_gamma_pos, sigma_ab, sigma_theta,
/// adapt_target, adapt_target_ab, adapt_window}; mcmc.{iterations, burnin,
/// thin, chains, seed}; data.{responses, fixed_c, exclude_items}.
struct RunConfig {
  ModelKind model = ModelKind::two_param;
  PriorConfig priors;
  TuningConfig tuning;
  McmcConfig mcmc;
  DataConfig data;

  /// Throws UsageError when a value is out of range or a required path is
  /// missing for the chosen model.
  void validate() const;
};

/// Relative data paths are resolved against `base_dir`. UsageError on unknown
/// keys, repeated keys, or malformed values, naming the line.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {},
                       const std::string& source = "<config>");
RunConfig read_config(const std::filesystem::path& path);
/// Writes every key, so the output parses back to an equal configuration.
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace skewirt

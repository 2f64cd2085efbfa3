#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skewirt/model.hpp"

namespace skewirt {

/// Known ground truth for a simulated test.
struct Scenario {
  std::size_t n_items = 0;
  std::size_t n_subjects = 0;
  std::vector<double> true_a;
  std::vector<double> true_b;
  std::vector<double> true_c;
  std::vector<double> true_gamma;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a vector has the wrong length or a
  /// value leaves its support.
  void validate() const;
};

struct SyntheticData {
  ResponseMatrix responses;
  std::vector<double> theta;
};

/// Seed of the one-off draw of preset item parameters. Fixed so that presets
/// share the same a and b whatever the subject count or response seed.
inline constexpr std::uint64_t kPresetItemSeed = 2024;

/// The 40 skewness values of the asymmetric preset, increasing from -0.99.
const std::vector<double>& asymmetric_gamma_grid();

/// "all-symmetric-40" or "all-asymmetric-40". a ~ N(1, 0.7^2) truncated to
/// a > 0 and b ~ N(0, 1), drawn from kPresetItemSeed; c = 0. `seed` drives
/// abilities and responses in generate(). Throws std::invalid_argument for an
/// unknown name.
Scenario preset(const std::string& name, std::size_t n_subjects, std::uint64_t seed);

const std::vector<std::string>& preset_names();

/// theta_j ~ N(0, 1), then y_ij ~ Bernoulli(icc(a_i (theta_j - b_i), gamma_i, c_i)).
SyntheticData generate(const Scenario& s);

}  // namespace skewirt

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skewirt/kernels.hpp"
#include "skewirt/model.hpp"
#include "skewirt/random.hpp"

namespace skewirt {

/// Random-walk proposal scales and their burn-in adaptation.
struct TuningConfig {
  double tau_gamma_neg = 0.1;
  double tau_gamma_pos = 0.1;
  /// (var a, cov ab, var b) of the bivariate (a, b) proposal.
  std::array<double, 3> sigma_ab{0.05 * 0.05, 0.0, 0.05 * 0.05};
  double sigma_theta = 0.5;
  /// Robbins-Monro targets: scalar blocks and the bivariate (a, b) block.
  double adapt_target = 0.44;
  double adapt_target_ab = 0.234;
  std::size_t adapt_window = 50;

  void validate() const;
};

struct McmcConfig {
  std::size_t iterations = 10000;
  std::size_t burnin = 5000;
  std::size_t thin = 5;
  std::size_t chains = 4;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t stored_draws() const { return (iterations - burnin) / thin; }
};

/// The blocks of one sweep, in sweep order.
enum class Block : std::uint8_t { theta = 0, ab, zw, gamma, guess, guess_rate };
inline constexpr std::size_t kBlockCount = 6;
const char* to_string(Block b);

struct BlockMask {
  std::array<bool, kBlockCount> on{true, true, true, true, true, true};
  static BlockMask only(Block b) {
    BlockMask m;
    m.on.fill(false);
    m.on[static_cast<std::size_t>(b)] = true;
    return m;
  }
  bool operator[](Block b) const { return on[static_cast<std::size_t>(b)]; }
};

struct BlockStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
  friend bool operator==(const BlockStats&, const BlockStats&) = default;
};

using AcceptanceCounts = std::array<BlockStats, kBlockCount>;

struct ChainState {
  std::vector<ItemState> items;
  std::vector<double> theta;
  AuxIndicators d;
  std::size_t iteration = 0;
};

/// One stored (thinned, post burn-in) snapshot. Guessing indicators are not
/// kept; only their per-item totals.
struct Draw {
  std::size_t iteration = 0;
  std::vector<ItemState> items;
  std::vector<double> theta;
  friend bool operator==(const Draw&, const Draw&) = default;
};

using KeyValue = std::pair<std::string, std::string>;

struct DrawStore {
  std::uint32_t chain = 1;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::two_param;
  std::vector<std::string> item_ids;
  std::size_t n_subjects = 0;
  std::vector<KeyValue> config_echo;
  AcceptanceCounts acceptance{};
  std::vector<Draw> draws;

  std::size_t n_items() const { return item_ids.size(); }
  friend bool operator==(const DrawStore&, const DrawStore&) = default;
};

/// Config entries (dotted keys) describing a run; echoed into draw files.
std::vector<KeyValue> describe_run(ModelKind model, const PriorConfig& priors, const TuningConfig& tuning,
                                   const McmcConfig& mcmc);

/// Metropolis-within-Gibbs sampler over the blocks theta, (a, b), (w, Z),
/// (gamma-, gamma+), D, c. Keeps log P(Y_ij | current parameters) for every
/// response in a cache, so each block evaluates the link only at its
/// proposal.
class Sampler {
 public:
  Sampler(const ResponseMatrix& y, PriorConfig priors, TuningConfig tuning, ModelKind model, ChainState init,
          std::uint64_t seed, std::uint64_t stream = 0, const kernels::KernelSet* kernel_set = nullptr);

  /// Data-driven starting point: standardised sum scores for theta, probit of
  /// 1 - facility for b, a = 1, c at its prior mean (or the fixed values),
  /// gamma-+ = -+0.5, z symmetric, w at its prior mean, D = 0.
  static ChainState initial_state(const ResponseMatrix& y, const PriorConfig& priors, ModelKind model,
                                  std::span<const double> fixed_c = {});

  void step_theta();
  void step_ab();
  void step_zw();
  void step_gamma();
  void step_d();
  void step_c();
  /// One full sweep in block order; blocks the model does not have are skipped.
  void sweep(const BlockMask& mask = {});

  /// Robbins-Monro scaling of proposal sds; meant for burn-in only.
  void set_adapting(bool on) { adapting_ = on; }
  bool adapting() const { return adapting_; }

  const ChainState& state() const { return state_; }
  const AcceptanceCounts& acceptance() const { return acceptance_; }
  void reset_acceptance() { acceptance_ = {}; }
  ModelKind model() const { return model_; }

  // Log Metropolis-Hastings ratios of the individual blocks at the current state.
  double log_ratio_zw(std::size_t item, Component proposed) const;
  double log_ratio_gamma(std::size_t item, Component side, double proposed) const;
  double log_ratio_ab(std::size_t item, double a, double b) const;
  double log_ratio_theta(std::size_t subject, double theta) const;
  /// P(D_ij = 1 | Y_ij, rest).
  double guess_probability(std::size_t item, std::size_t subject) const;
  /// Beta parameters of the full conditional of c_i.
  std::pair<double, double> guess_posterior(std::size_t item) const;

  /// Unnormalised log posterior of the current state.
  double log_posterior() const;
  /// Sum of cached log-likelihood terms (pairs with D = 0).
  double cached_loglik() const;

  double theta_scale(std::size_t subject) const { return theta_sd_[subject]; }
  double ab_scale(std::size_t item) const { return ab_scale_[item]; }
  double gamma_scale(std::size_t item, Component side) const;

 private:
  struct Adaptive {
    std::uint32_t proposed = 0;
    std::uint32_t accepted = 0;
  };

  kernels::ItemLink link(std::size_t item) const;
  kernels::ItemLink link_with(std::size_t item, double a, double b, double gamma) const;
  double item_delta(const kernels::ItemLink& proposal, std::size_t item, std::span<double> out) const;
  void refresh_item(std::size_t item);
  double log_prior_ab(double a, double b) const;
  void record(Block b, bool accepted);
  void maybe_adapt();

  const ResponseMatrix& y_;
  PriorConfig priors_;
  TuningConfig tuning_;
  ModelKind model_;
  ChainState state_;
  Rng rng_;
  const kernels::KernelSet& kernels_;

  std::size_t n_items_;
  std::size_t n_subjects_;
  std::vector<double> terms_;    // I x J log P(Y_ij | current), unmasked
  std::vector<double> scratch_;  // I x J proposal terms for the theta block
  std::vector<double> row_;      // J proposal terms for item blocks
  std::vector<double> theta_prop_;
  std::vector<double> theta_delta_;
  std::vector<std::uint8_t> theta_accept_;

  std::array<double, 3> chol_ab_{};  // lower Cholesky factor (l11, l21, l22)
  std::vector<double> theta_sd_;
  std::vector<double> ab_scale_;
  std::vector<double> gneg_sd_;
  std::vector<double> gpos_sd_;
  std::vector<Adaptive> theta_ad_, ab_ad_, gneg_ad_, gpos_ad_;
  bool adapting_ = false;
  std::size_t sweeps_in_window_ = 0;
  std::size_t windows_ = 0;

  AcceptanceCounts acceptance_{};
};

/// Runs one chain: burn-in with adaptation, then a fixed kernel with thinned
/// storage. `chain` (1-based) selects an independent random stream.
DrawStore run_chain(const ResponseMatrix& y, const PriorConfig& priors, const TuningConfig& tuning,
                    const McmcConfig& mcmc, ModelKind model, std::span<const double> fixed_c = {},
                    std::uint32_t chain = 1, const kernels::KernelSet* kernel_set = nullptr);

/// mcmc.chains independent chains on separate threads.
std::vector<DrawStore> run_chains(const ResponseMatrix& y, const PriorConfig& priors, const TuningConfig& tuning,
                                  const McmcConfig& mcmc, ModelKind model, std::span<const double> fixed_c = {},
                                  const kernels::KernelSet* kernel_set = nullptr);

}  // namespace skewirt

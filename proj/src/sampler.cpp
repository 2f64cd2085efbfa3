#include "skewirt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "skewirt/errors.hpp"
#include "skewirt/format.hpp"

namespace skewirt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kInitRetries = 20;

double probit(double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

std::string join3(const std::array<double, 3>& v) {
  return format_double(v[0]) + ", " + format_double(v[1]) + ", " + format_double(v[2]);
}

bool accept(Rng& rng, double log_ratio) {
  if (log_ratio >= 0.0) {
    rng.uniform();  // keep one uniform per decision
    return true;
  }
  return std::log(rng.uniform_pos()) < log_ratio;
}

}  // namespace

const char* to_string(Block b) {
  switch (b) {
    case Block::theta: return "theta";
    case Block::ab: return "ab";
    case Block::zw: return "zw";
    case Block::gamma: return "gamma";
    case Block::guess: return "d";
    case Block::guess_rate: return "c";
  }
  return "?";
}

void TuningConfig::validate() const {
  if (!(tau_gamma_neg > 0.0 && tau_gamma_pos > 0.0 && sigma_theta > 0.0))
    throw std::invalid_argument("proposal scales must be positive");
  const double va = sigma_ab[0], cov = sigma_ab[1], vb = sigma_ab[2];
  if (!(va > 0.0 && vb > 0.0 && va * vb - cov * cov > 0.0))
    throw std::invalid_argument("sigma_ab must be positive definite");
  if (!(adapt_target > 0.0 && adapt_target < 1.0 && adapt_target_ab > 0.0 && adapt_target_ab < 1.0))
    throw std::invalid_argument("adaptation targets must lie in (0, 1)");
  if (adapt_window == 0) throw std::invalid_argument("adapt_window must be positive");
}

void McmcConfig::validate() const {
  if (!(iterations > burnin)) throw std::invalid_argument("iterations must exceed burnin");
  if (thin == 0) throw std::invalid_argument("thin must be at least 1");
  if (chains == 0) throw std::invalid_argument("chains must be at least 1");
}

std::vector<KeyValue> describe_run(ModelKind model, const PriorConfig& priors, const TuningConfig& tuning,
                                   const McmcConfig& mcmc) {
  return {
      {"model", to_string(model)},
      {"priors.dirichlet", join3(priors.dirichlet)},
      {"priors.beta_skew", format_double(priors.skew_alpha) + ", " + format_double(priors.skew_beta)},
      {"priors.mu_a", format_double(priors.mu_a)},
      {"priors.sigma_a", format_double(priors.sigma_a)},
      {"priors.mu_b", format_double(priors.mu_b)},
      {"priors.sigma_b", format_double(priors.sigma_b)},
      {"priors.beta_guess", format_double(priors.guess_alpha) + ", " + format_double(priors.guess_beta)},
      {"tuning.tau_gamma_neg", format_double(tuning.tau_gamma_neg)},
      {"tuning.tau_gamma_pos", format_double(tuning.tau_gamma_pos)},
      {"tuning.sigma_ab", join3(tuning.sigma_ab)},
      {"tuning.sigma_theta", format_double(tuning.sigma_theta)},
      {"tuning.adapt_target", format_double(tuning.adapt_target)},
      {"tuning.adapt_target_ab", format_double(tuning.adapt_target_ab)},
      {"tuning.adapt_window", std::to_string(tuning.adapt_window)},
      {"mcmc.iterations", std::to_string(mcmc.iterations)},
      {"mcmc.burnin", std::to_string(mcmc.burnin)},
      {"mcmc.thin", std::to_string(mcmc.thin)},
      {"mcmc.chains", std::to_string(mcmc.chains)},
      {"mcmc.seed", std::to_string(mcmc.seed)},
  };
}

Sampler::Sampler(const ResponseMatrix& y, PriorConfig priors, TuningConfig tuning, ModelKind model,
                 ChainState init, std::uint64_t seed, std::uint64_t stream, const kernels::KernelSet* kernel_set)
    : y_(y),
      priors_(priors),
      tuning_(tuning),
      model_(model),
      state_(std::move(init)),
      rng_(seed, stream),
      kernels_(kernel_set ? *kernel_set : kernels::active_kernels()),
      n_items_(y.n_items()),
      n_subjects_(y.n_subjects()) {
  priors_.validate();
  tuning_.validate();
  if (state_.items.size() != n_items_ || state_.theta.size() != n_subjects_)
    throw std::invalid_argument("initial state does not match the response matrix");
  if (state_.d.n_items() == 0 && state_.d.n_subjects() == 0) state_.d = AuxIndicators(n_items_, n_subjects_);
  if (state_.d.n_items() != n_items_ || state_.d.n_subjects() != n_subjects_)
    throw std::invalid_argument("guessing indicators do not match the response matrix");
  for (std::size_t i = 0; i < n_items_; ++i) {
    state_.items[i].validate();
    for (std::size_t j = 0; j < n_subjects_; ++j) {
      if (state_.d(i, j) && !y_.y(i, j)) throw std::invalid_argument("D_ij = 1 requires Y_ij = 1");
    }
  }
  if (model_ == ModelKind::two_param) {
    for (const auto& it : state_.items) {
      if (it.c != 0.0) throw std::invalid_argument("2pcsp requires c = 0");
    }
    for (std::uint8_t v : state_.d.cells()) {
      if (v) throw std::invalid_argument("2pcsp requires D = 0");
    }
  }

  const double va = tuning_.sigma_ab[0], cov = tuning_.sigma_ab[1], vb = tuning_.sigma_ab[2];
  chol_ab_[0] = std::sqrt(va);
  chol_ab_[1] = cov / chol_ab_[0];
  chol_ab_[2] = std::sqrt(vb - chol_ab_[1] * chol_ab_[1]);

  terms_.resize(n_items_ * n_subjects_);
  scratch_.resize(n_items_ * n_subjects_);
  row_.resize(n_subjects_);
  theta_prop_.resize(n_subjects_);
  theta_delta_.resize(n_subjects_);
  theta_accept_.resize(n_subjects_);
  theta_sd_.assign(n_subjects_, tuning_.sigma_theta);
  ab_scale_.assign(n_items_, 1.0);
  gneg_sd_.assign(n_items_, tuning_.tau_gamma_neg);
  gpos_sd_.assign(n_items_, tuning_.tau_gamma_pos);
  theta_ad_.resize(n_subjects_);
  ab_ad_.resize(n_items_);
  gneg_ad_.resize(n_items_);
  gpos_ad_.resize(n_items_);

  for (std::size_t i = 0; i < n_items_; ++i) refresh_item(i);
}

ChainState Sampler::initial_state(const ResponseMatrix& y, const PriorConfig& priors, ModelKind model,
                                  std::span<const double> fixed_c) {
  const std::size_t I = y.n_items(), J = y.n_subjects();
  if (model == ModelKind::three_param_fixed_c && fixed_c.size() != I)
    throw std::invalid_argument("fixed guessing values must be given for every item");
  ChainState s;
  s.d = AuxIndicators(I, J);
  s.theta.resize(J);

  std::vector<double> score(J, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    const auto row = y.y.row(i);
    for (std::size_t j = 0; j < J; ++j) score[j] += row[j];
  }
  double mean = 0.0;
  for (double v : score) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(J, 1));
  double var = 0.0;
  for (double v : score) var += (v - mean) * (v - mean);
  const double sd = J > 1 ? std::sqrt(var / static_cast<double>(J - 1)) : 0.0;
  for (std::size_t j = 0; j < J; ++j) s.theta[j] = sd > 0.0 ? (score[j] - mean) / sd : 0.0;

  const double alpha_sum = priors.dirichlet[0] + priors.dirichlet[1] + priors.dirichlet[2];
  s.items.resize(I);
  for (std::size_t i = 0; i < I; ++i) {
    ItemState& it = s.items[i];
    double correct = 0.0;
    for (std::uint8_t v : y.y.row(i)) correct += v;
    const double facility = J ? correct / static_cast<double>(J) : 0.5;
    it.a = 1.0;
    it.b = std::clamp(probit(1.0 - facility), -4.0, 4.0);
    switch (model) {
      case ModelKind::two_param: it.c = 0.0; break;
      case ModelKind::three_param: it.c = priors.guess_alpha / (priors.guess_alpha + priors.guess_beta); break;
      case ModelKind::three_param_fixed_c: it.c = fixed_c[i]; break;
    }
    it.gamma_neg = -0.5;
    it.gamma_pos = 0.5;
    it.z = Component::symmetric;
    for (int k = 0; k < 3; ++k) it.w[k] = priors.dirichlet[k] / alpha_sum;
  }
  return s;
}

kernels::ItemLink Sampler::link(std::size_t item) const {
  const ItemState& it = state_.items[item];
  return link_with(item, it.a, it.b, it.gamma());
}

kernels::ItemLink Sampler::link_with(std::size_t, double a, double b, double gamma) const {
  return kernels::make_link(a, b, csn::Skewness(gamma));
}

void Sampler::refresh_item(std::size_t item) {
  kernels_.log_terms(link(item), state_.theta.data(), y_.y.row(item).data(), terms_.data() + item * n_subjects_,
                     n_subjects_);
}

double Sampler::item_delta(const kernels::ItemLink& proposal, std::size_t item, std::span<double> out) const {
  kernels_.log_terms(proposal, state_.theta.data(), y_.y.row(item).data(), out.data(), n_subjects_);
  return kernels_.masked_delta(out.data(), terms_.data() + item * n_subjects_, state_.d.row(item).data(),
                               n_subjects_);
}

double Sampler::log_prior_ab(double a, double b) const {
  if (!(a > 0.0)) return kNegInf;
  const double za = (a - priors_.mu_a) / priors_.sigma_a;
  const double zb = (b - priors_.mu_b) / priors_.sigma_b;
  return -0.5 * (za * za + zb * zb);
}

void Sampler::record(Block b, bool accepted) {
  auto& s = acceptance_[static_cast<std::size_t>(b)];
  ++s.proposed;
  if (accepted) ++s.accepted;
}

double Sampler::gamma_scale(std::size_t item, Component side) const {
  return side == Component::negative ? gneg_sd_[item] : gpos_sd_[item];
}

// ---------------------------------------------------------------------------
// Log ratios

double Sampler::log_ratio_zw(std::size_t item, Component proposed) const {
  const ItemState& it = state_.items[item];
  const double g_new = it.gamma_of(proposed);
  if (g_new == it.gamma()) return 0.0;
  std::vector<double> out(n_subjects_);
  return item_delta(link_with(item, it.a, it.b, g_new), item, out);
}

double Sampler::log_ratio_gamma(std::size_t item, Component side, double proposed) const {
  if (side == Component::symmetric) throw std::invalid_argument("no skewness to update for a symmetric item");
  const ItemState& it = state_.items[item];
  const double current = it.gamma_of(side);
  const double prior_new = log_truncated_beta(std::abs(proposed), priors_.skew_alpha, priors_.skew_beta);
  const bool sign_ok = side == Component::negative ? proposed < 0.0 : proposed > 0.0;
  if (!sign_ok || prior_new == kNegInf) return kNegInf;
  const double prior_old = log_truncated_beta(std::abs(current), priors_.skew_alpha, priors_.skew_beta);
  double lik = 0.0;
  if (it.z == side) {
    std::vector<double> out(n_subjects_);
    lik = item_delta(link_with(item, it.a, it.b, proposed), item, out);
  }
  return lik + prior_new - prior_old;
}

double Sampler::log_ratio_ab(std::size_t item, double a, double b) const {
  const ItemState& it = state_.items[item];
  const double prior_new = log_prior_ab(a, b);
  if (prior_new == kNegInf) return kNegInf;
  std::vector<double> out(n_subjects_);
  const double lik = item_delta(link_with(item, a, b, it.gamma()), item, out);
  return lik + prior_new - log_prior_ab(it.a, it.b);
}

double Sampler::log_ratio_theta(std::size_t subject, double theta) const {
  double lik = 0.0;
  for (std::size_t i = 0; i < n_items_; ++i) {
    if (state_.d(i, subject)) continue;
    double term;
    const std::uint8_t yij = y_.y(i, subject);
    kernels_.log_terms(link(i), &theta, &yij, &term, 1);
    lik += term - terms_[i * n_subjects_ + subject];
  }
  const double t0 = state_.theta[subject];
  return lik - 0.5 * (theta * theta - t0 * t0);
}

double Sampler::guess_probability(std::size_t item, std::size_t subject) const {
  if (!y_.y(item, subject)) return 0.0;
  const double c = state_.items[item].c;
  if (c == 0.0) return 0.0;
  const double f = std::exp(terms_[item * n_subjects_ + subject]);
  return c / (c + (1.0 - c) * f);
}

std::pair<double, double> Sampler::guess_posterior(std::size_t item) const {
  double guessed = 0.0;
  for (std::uint8_t v : state_.d.row(item)) guessed += v;
  return {guessed + priors_.guess_alpha, static_cast<double>(n_subjects_) - guessed + priors_.guess_beta};
}

double Sampler::cached_loglik() const {
  double total = 0.0;
  for (std::size_t i = 0; i < n_items_; ++i) {
    const auto d = state_.d.row(i);
    for (std::size_t j = 0; j < n_subjects_; ++j) {
      if (!d[j]) total += terms_[i * n_subjects_ + j];
    }
  }
  return total;
}

double Sampler::log_posterior() const {
  const bool estimate_c = model_ == ModelKind::three_param;
  double total = cached_loglik() + log_prior(state_.items, state_.theta, priors_, estimate_c);
  for (std::size_t i = 0; i < n_items_; ++i) {
    const double c = state_.items[i].c;
    for (std::uint8_t v : state_.d.row(i)) total += v ? std::log(c) : std::log1p(-c);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Blocks

void Sampler::step_theta() {
  for (std::size_t j = 0; j < n_subjects_; ++j) theta_prop_[j] = state_.theta[j] + theta_sd_[j] * rng_.normal();
  std::fill(theta_delta_.begin(), theta_delta_.end(), 0.0);
  for (std::size_t i = 0; i < n_items_; ++i) {
    double* prop = scratch_.data() + i * n_subjects_;
    const double* cur = terms_.data() + i * n_subjects_;
    const std::uint8_t* d = state_.d.row(i).data();
    kernels_.log_terms(link(i), theta_prop_.data(), y_.y.row(i).data(), prop, n_subjects_);
    for (std::size_t j = 0; j < n_subjects_; ++j) theta_delta_[j] += d[j] ? 0.0 : prop[j] - cur[j];
  }
  for (std::size_t j = 0; j < n_subjects_; ++j) {
    const double t0 = state_.theta[j], t1 = theta_prop_[j];
    const double log_r = theta_delta_[j] - 0.5 * (t1 * t1 - t0 * t0);
    const bool ok = accept(rng_, log_r);
    theta_accept_[j] = ok;
    record(Block::theta, ok);
    ++theta_ad_[j].proposed;
    if (ok) {
      ++theta_ad_[j].accepted;
      state_.theta[j] = t1;
    }
  }
  for (std::size_t i = 0; i < n_items_; ++i) {
    double* cur = terms_.data() + i * n_subjects_;
    const double* prop = scratch_.data() + i * n_subjects_;
    for (std::size_t j = 0; j < n_subjects_; ++j) {
      if (theta_accept_[j]) cur[j] = prop[j];
    }
  }
}

void Sampler::step_ab() {
  for (std::size_t i = 0; i < n_items_; ++i) {
    ItemState& it = state_.items[i];
    const double n1 = rng_.normal(), n2 = rng_.normal();
    const double s = ab_scale_[i];
    const double a_new = it.a + s * chol_ab_[0] * n1;
    const double b_new = it.b + s * (chol_ab_[1] * n1 + chol_ab_[2] * n2);
    double log_r = kNegInf;
    const double prior_new = log_prior_ab(a_new, b_new);
    if (prior_new != kNegInf) {
      log_r = item_delta(link_with(i, a_new, b_new, it.gamma()), i, row_) + prior_new - log_prior_ab(it.a, it.b);
    }
    const bool ok = accept(rng_, log_r);
    record(Block::ab, ok);
    ++ab_ad_[i].proposed;
    if (ok) {
      ++ab_ad_[i].accepted;
      it.a = a_new;
      it.b = b_new;
      std::copy(row_.begin(), row_.end(), terms_.begin() + static_cast<std::ptrdiff_t>(i * n_subjects_));
    }
  }
}

void Sampler::step_zw() {
  for (std::size_t i = 0; i < n_items_; ++i) {
    ItemState& it = state_.items[i];
    // Independence proposal from the prior: w* ~ Dirichlet, Z* ~ Multinomial(1, w*).
    const std::array<double, 3> w_new = rng_.dirichlet(priors_.dirichlet);
    const double u = rng_.uniform();
    Component z_new = Component::positive;
    if (u < w_new[0]) {
      z_new = Component::symmetric;
    } else if (u < w_new[0] + w_new[1]) {
      z_new = Component::negative;
    }
    const double g_new = it.gamma_of(z_new);
    const bool same_link = g_new == it.gamma();
    const double log_r = same_link ? 0.0 : item_delta(link_with(i, it.a, it.b, g_new), i, row_);
    const bool ok = accept(rng_, log_r);
    record(Block::zw, ok);
    if (ok) {
      it.w = w_new;
      it.z = z_new;
      if (!same_link) {
        std::copy(row_.begin(), row_.end(), terms_.begin() + static_cast<std::ptrdiff_t>(i * n_subjects_));
      }
    }
  }
}

void Sampler::step_gamma() {
  for (std::size_t i = 0; i < n_items_; ++i) {
    ItemState& it = state_.items[i];
    if (it.z == Component::symmetric) continue;
    const bool neg = it.z == Component::negative;
    double& current = neg ? it.gamma_neg : it.gamma_pos;
    double& sd = neg ? gneg_sd_[i] : gpos_sd_[i];
    Adaptive& ad = neg ? gneg_ad_[i] : gpos_ad_[i];
    const double proposal = current + sd * rng_.normal();
    const bool inside = neg ? (proposal < 0.0 && proposal > -csn::kGammaMax)
                            : (proposal > 0.0 && proposal < csn::kGammaMax);
    double log_r = kNegInf;
    if (inside) {
      log_r = item_delta(link_with(i, it.a, it.b, proposal), i, row_) +
              log_truncated_beta(std::abs(proposal), priors_.skew_alpha, priors_.skew_beta) -
              log_truncated_beta(std::abs(current), priors_.skew_alpha, priors_.skew_beta);
    }
    const bool ok = accept(rng_, log_r);
    record(Block::gamma, ok);
    ++ad.proposed;
    if (ok) {
      ++ad.accepted;
      current = proposal;
      std::copy(row_.begin(), row_.end(), terms_.begin() + static_cast<std::ptrdiff_t>(i * n_subjects_));
    }
  }
}

void Sampler::step_d() {
  if (model_ == ModelKind::two_param) return;
  for (std::size_t i = 0; i < n_items_; ++i) {
    const double c = state_.items[i].c;
    const auto y = y_.y.row(i);
    auto d = state_.d.row(i);
    const double* t = terms_.data() + i * n_subjects_;
    for (std::size_t j = 0; j < n_subjects_; ++j) {
      if (!y[j]) {
        d[j] = 0;
        continue;
      }
      const double r = c / (c + (1.0 - c) * std::exp(t[j]));
      d[j] = rng_.uniform() < r ? 1 : 0;
    }
    record(Block::guess, true);
  }
}

void Sampler::step_c() {
  if (model_ != ModelKind::three_param) return;
  for (std::size_t i = 0; i < n_items_; ++i) {
    const auto [alpha, beta] = guess_posterior(i);
    double c = rng_.beta(alpha, beta);
    if (c >= 1.0) c = std::nextafter(1.0, 0.0);
    state_.items[i].c = c;
    record(Block::guess_rate, true);
  }
}

void Sampler::sweep(const BlockMask& mask) {
  if (mask[Block::theta]) step_theta();
  if (mask[Block::ab]) step_ab();
  if (mask[Block::zw]) step_zw();
  if (mask[Block::gamma]) step_gamma();
  if (mask[Block::guess]) step_d();
  if (mask[Block::guess_rate]) step_c();
  ++state_.iteration;
  if (adapting_) maybe_adapt();
}

void Sampler::maybe_adapt() {
  if (++sweeps_in_window_ < tuning_.adapt_window) return;
  sweeps_in_window_ = 0;
  ++windows_;
  const double step = 1.0 / std::sqrt(static_cast<double>(windows_));
  auto update = [step](double& scale, Adaptive& ad, double target) {
    if (ad.proposed == 0) return;
    const double rate = static_cast<double>(ad.accepted) / ad.proposed;
    scale *= std::exp(step * (rate - target));
    ad = {};
  };
  for (std::size_t j = 0; j < n_subjects_; ++j) update(theta_sd_[j], theta_ad_[j], tuning_.adapt_target);
  for (std::size_t i = 0; i < n_items_; ++i) {
    update(ab_scale_[i], ab_ad_[i], tuning_.adapt_target_ab);
    update(gneg_sd_[i], gneg_ad_[i], tuning_.adapt_target);
    update(gpos_sd_[i], gpos_ad_[i], tuning_.adapt_target);
  }
}

// ---------------------------------------------------------------------------

DrawStore run_chain(const ResponseMatrix& y, const PriorConfig& priors, const TuningConfig& tuning,
                    const McmcConfig& mcmc, ModelKind model, std::span<const double> fixed_c, std::uint32_t chain,
                    const kernels::KernelSet* kernel_set) {
  mcmc.validate();
  if (chain == 0) throw std::invalid_argument("chain ids are 1-based");
  ChainState init = Sampler::initial_state(y, priors, model, fixed_c);
  {
    // Jitter theta until every cached term is finite.
    Rng jitter(mcmc.seed, 0x9e3779b97f4a7c15ULL ^ chain);
    ChainState trial = init;
    for (int attempt = 0;; ++attempt) {
      Sampler probe(y, priors, tuning, model, trial, mcmc.seed, chain, kernel_set);
      if (std::isfinite(probe.cached_loglik())) break;
      if (attempt == kInitRetries) throw NumericalError("non-finite log-likelihood at the starting point");
      trial = init;
      for (double& t : trial.theta) t += 0.5 * jitter.normal();
    }
    init = std::move(trial);
  }
  Sampler sampler(y, priors, tuning, model, std::move(init), mcmc.seed, chain, kernel_set);

  DrawStore store;
  store.chain = chain;
  store.seed = mcmc.seed;
  store.model = model;
  store.item_ids = y.item_ids;
  store.n_subjects = y.n_subjects();
  store.config_echo = describe_run(model, priors, tuning, mcmc);
  store.draws.reserve(mcmc.stored_draws());

  sampler.set_adapting(true);
  for (std::size_t t = 1; t <= mcmc.iterations; ++t) {
    if (t == mcmc.burnin + 1) {
      sampler.set_adapting(false);
      sampler.reset_acceptance();
    }
    sampler.sweep();
    if (t > mcmc.burnin && (t - mcmc.burnin) % mcmc.thin == 0) {
      store.draws.push_back({t, sampler.state().items, sampler.state().theta});
    }
  }
  if (!std::isfinite(sampler.cached_loglik())) throw NumericalError("log-likelihood became non-finite");
  store.acceptance = sampler.acceptance();
  return store;
}

std::vector<DrawStore> run_chains(const ResponseMatrix& y, const PriorConfig& priors, const TuningConfig& tuning,
                                  const McmcConfig& mcmc, ModelKind model, std::span<const double> fixed_c,
                                  const kernels::KernelSet* kernel_set) {
  mcmc.validate();
  std::vector<DrawStore> stores(mcmc.chains);
  std::vector<std::exception_ptr> errors(mcmc.chains);
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < mcmc.chains; ++k) {
      workers.emplace_back([&, k] {
        try {
          stores[k] = run_chain(y, priors, tuning, mcmc, model, fixed_c, static_cast<std::uint32_t>(k + 1), kernel_set);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return stores;
}

}  // namespace skewirt

#include "skewirt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/special_functions/beta.hpp>

namespace skewirt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}
}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::two_param: return "2pcsp";
    case ModelKind::three_param: return "3pcsp";
    case ModelKind::three_param_fixed_c: return "3pcsp-fixed-c";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "2pcsp") return ModelKind::two_param;
  if (name == "3pcsp") return ModelKind::three_param;
  if (name == "3pcsp-fixed-c") return ModelKind::three_param_fixed_c;
  throw std::invalid_argument("unknown model '" + name + "' (expected 2pcsp, 3pcsp, 3pcsp-fixed-c)");
}

double ItemState::gamma_of(Component k) const {
  switch (k) {
    case Component::symmetric: return 0.0;
    case Component::negative: return gamma_neg;
    case Component::positive: return gamma_pos;
  }
  return 0.0;
}

double ItemState::gamma() const { return gamma_of(z); }

void ItemState::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("discrimination must be positive");
  if (!std::isfinite(b)) throw std::invalid_argument("difficulty must be finite");
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("guessing must lie in [0, 1)");
  if (!(gamma_neg < 0.0 && gamma_neg > -csn::kGammaMax))
    throw std::invalid_argument("gamma_neg must lie in (-0.99527, 0)");
  if (!(gamma_pos > 0.0 && gamma_pos < csn::kGammaMax))
    throw std::invalid_argument("gamma_pos must lie in (0, 0.99527)");
  double total = 0.0;
  for (double v : w) {
    if (!(v > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
}

ResponseMatrix make_responses(BinaryMatrix<ResponseTag> y) {
  ResponseMatrix r;
  for (std::size_t i = 0; i < y.n_items(); ++i) r.item_ids.push_back("item" + std::to_string(i + 1));
  for (std::size_t j = 0; j < y.n_subjects(); ++j) r.subject_ids.push_back("s" + std::to_string(j + 1));
  r.y = std::move(y);
  return r;
}

ResponseMatrix ResponseMatrix::without_items(const std::vector<std::string>& ids) const {
  std::unordered_set<std::string> drop(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (std::find(item_ids.begin(), item_ids.end(), id) == item_ids.end())
      throw std::invalid_argument("cannot exclude unknown item '" + id + "'");
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n_items(); ++i) {
    if (!drop.contains(item_ids[i])) keep.push_back(i);
  }
  ResponseMatrix out;
  out.subject_ids = subject_ids;
  out.y = BinaryMatrix<ResponseTag>(keep.size(), n_subjects());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.item_ids.push_back(item_ids[keep[k]]);
    std::copy_n(y.row(keep[k]).begin(), n_subjects(), out.y.row(k).begin());
  }
  return out;
}

void PriorConfig::validate() const {
  for (double v : dirichlet) {
    if (!(v > 0.0)) throw std::invalid_argument("Dirichlet parameters must be positive");
  }
  if (!(skew_alpha > 0.0 && skew_beta > 0.0)) throw std::invalid_argument("skewness Beta parameters must be positive");
  if (!(sigma_a > 0.0 && sigma_b > 0.0)) throw std::invalid_argument("prior scales must be positive");
  if (!(guess_alpha > 0.0 && guess_beta > 0.0)) throw std::invalid_argument("guessing Beta parameters must be positive");
}

double predictor(double a, double b, double theta) { return a * (theta - b); }

double icc(double m, csn::Skewness gamma, double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("guessing parameter outside [0, 1)");
  return c + (1.0 - c) * csn::cdf(m, gamma);
}

double mixture_icc(double m, const std::array<double, 3>& w, double gamma_neg, double gamma_pos) {
  return w[0] * csn::cdf(m, csn::Skewness(0.0)) + w[1] * csn::cdf(m, csn::Skewness(gamma_neg)) +
         w[2] * csn::cdf(m, csn::Skewness(gamma_pos));
}

double loglik(std::span<const ItemState> items, std::span<const double> theta, const ResponseMatrix& y,
              const AuxIndicators& d) {
  if (items.size() != y.n_items() || theta.size() != y.n_subjects() ||
      d.n_items() != y.n_items() || d.n_subjects() != y.n_subjects()) {
    throw std::invalid_argument("loglik: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const csn::Skewness g(items[i].gamma());
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (d(i, j)) continue;
      const double m = predictor(items[i].a, items[i].b, theta[j]);
      const double p = y.y(i, j) ? csn::cdf(m, g) : csn::ccdf(m, g);
      if (p <= 0.0) return kNegInf;
      total += std::log(p);
    }
  }
  return total;
}

double log_augmented(std::span<const ItemState> items, std::span<const double> theta, const ResponseMatrix& y,
                     const AuxIndicators& d) {
  double total = loglik(items, theta, y, d);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double c = items[i].c;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (d(i, j) && !y.y(i, j)) return kNegInf;
      total += d(i, j) ? std::log(c) : std::log1p(-c);
    }
  }
  return total;
}

double loglik_marginal(std::span<const ItemState> items, std::span<const double> theta, const ResponseMatrix& y) {
  if (items.size() != y.n_items() || theta.size() != y.n_subjects())
    throw std::invalid_argument("loglik_marginal: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const csn::Skewness g(items[i].gamma());
    const double c = items[i].c;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double m = predictor(items[i].a, items[i].b, theta[j]);
      // P(Y = 0) = (1 - c)(1 - F) keeps the upper tail accurate.
      const double p = y.y(i, j) ? c + (1.0 - c) * csn::cdf(m, g) : (1.0 - c) * csn::ccdf(m, g);
      if (p <= 0.0) return kNegInf;
      total += std::log(p);
    }
  }
  return total;
}

double log_truncated_beta(double x, double alpha, double beta) {
  if (!(x > 0.0 && x < csn::kGammaMax)) return kNegInf;
  const double log_norm = std::log(boost::math::ibeta(alpha, beta, csn::kGammaMax)) +
                          std::log(boost::math::beta(alpha, beta));
  return (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - log_norm;
}

double log_prior(std::span<const ItemState> items, std::span<const double> theta,
                 const PriorConfig& config, bool estimate_c) {
  double total = 0.0;
  const double log_trunc_a = std::log(csn::norm_cdf(config.mu_a / config.sigma_a));
  const auto& al = config.dirichlet;
  const double log_dir_norm = std::lgamma(al[0] + al[1] + al[2]) - std::lgamma(al[0]) -
                              std::lgamma(al[1]) - std::lgamma(al[2]);
  for (const ItemState& it : items) {
    if (!(it.a > 0.0)) return kNegInf;
    total += log_normal_pdf(it.a, config.mu_a, config.sigma_a) - log_trunc_a;
    total += log_normal_pdf(it.b, config.mu_b, config.sigma_b);

    double wsum = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (!(it.w[k] > 0.0)) return kNegInf;
      wsum += it.w[k];
      total += (al[k] - 1.0) * std::log(it.w[k]);
    }
    if (std::abs(wsum - 1.0) > 1e-9) return kNegInf;
    total += log_dir_norm;
    total += std::log(it.w[index(it.z)]);

    total += log_truncated_beta(it.gamma_pos, config.skew_alpha, config.skew_beta);
    total += log_truncated_beta(-it.gamma_neg, config.skew_alpha, config.skew_beta);

    if (estimate_c) {
      if (!(it.c > 0.0 && it.c < 1.0)) return kNegInf;
      total += (config.guess_alpha - 1.0) * std::log(it.c) + (config.guess_beta - 1.0) * std::log1p(-it.c) -
               std::log(boost::math::beta(config.guess_alpha, config.guess_beta));
    }
    if (total == kNegInf) return kNegInf;
  }
  for (double t : theta) total += log_normal_pdf(t, 0.0, 1.0);
  return total;
}

}  // namespace skewirt

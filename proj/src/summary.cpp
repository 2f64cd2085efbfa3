#include "skewirt/summary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace skewirt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_stores(std::span<const DrawStore> stores) {
  if (stores.empty()) throw std::invalid_argument("no chains to summarise");
  std::size_t total = 0;
  for (const auto& s : stores) {
    if (s.item_ids != stores.front().item_ids || s.n_subjects != stores.front().n_subjects)
      throw std::invalid_argument("chains disagree on items or subjects");
    total += s.draws.size();
  }
  if (total < 2) throw std::invalid_argument("at least 2 stored draws are needed");
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Interval interval(std::vector<double> v, double level) {
  if (v.empty()) return {0.0, 0.0};
  const double tail = 0.5 * (1.0 - level);
  return {quantile(v, tail), quantile(v, 1.0 - tail)};
}

}  // namespace

const char* to_string(SkewFlag f) {
  switch (f) {
    case SkewFlag::none: return "-";
    case SkewFlag::insignificant: return "insignificant";
    case SkewFlag::clear: return "clear";
  }
  return "?";
}

SkewFlag skew_flag(double gamma) {
  const double g = std::abs(gamma);
  if (g < 0.4) return SkewFlag::insignificant;
  if (g > 0.9) return SkewFlag::clear;
  return SkewFlag::none;
}

double quantile(std::vector<double>& values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ItemSummary> summarize_items(std::span<const DrawStore> stores, double level) {
  check_stores(stores);
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("credible level must lie in (0, 1)");
  const std::size_t n_items = stores.front().n_items();
  std::vector<ItemSummary> out(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    std::vector<double> a, b, c;
    std::array<std::size_t, 3> counts{};
    for (const auto& s : stores) {
      for (const auto& d : s.draws) {
        const ItemState& it = d.items[i];
        a.push_back(it.a);
        b.push_back(it.b);
        c.push_back(it.c);
        ++counts[index(it.z)];
      }
    }
    const auto n = static_cast<double>(a.size());
    ItemSummary& r = out[i];
    r.item_id = stores.front().item_ids[i];
    r.post_mean_a = mean(a);
    r.post_mean_b = mean(b);
    r.post_mean_c = mean(c);
    r.ci_a = interval(std::move(a), level);
    r.ci_b = interval(std::move(b), level);
    r.ci_c = interval(std::move(c), level);
    for (int k = 0; k < 3; ++k) r.z_probs[k] = static_cast<double>(counts[k]) / n;
    std::size_t modal = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (counts[k] > counts[modal]) modal = k;
    }
    r.classification = static_cast<Component>(modal);
    if (r.classification != Component::symmetric) {
      std::vector<double> g;
      for (const auto& s : stores) {
        for (const auto& d : s.draws) {
          if (d.items[i].z == r.classification) g.push_back(d.items[i].gamma());
        }
      }
      r.gamma_est = mean(g);
      r.ci_gamma = interval(std::move(g), level);
    }
    r.flag = skew_flag(r.gamma_est);
  }
  return out;
}

std::vector<double> posterior_mean_theta(std::span<const DrawStore> stores) {
  check_stores(stores);
  std::vector<double> sum(stores.front().n_subjects, 0.0);
  std::size_t n = 0;
  for (const auto& s : stores) {
    for (const auto& d : s.draws) {
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += d.theta[j];
      ++n;
    }
  }
  for (double& v : sum) v /= static_cast<double>(n);
  return sum;
}

double rmse(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("rmse needs equal, non-empty inputs");
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) ss += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson needs equal inputs of length >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

RecoveryReport recovery_report(std::span<const ItemSummary> items, std::span<const double> theta_mean,
                               const Scenario& truth, std::span<const double> true_theta) {
  if (items.size() != truth.n_items || truth.true_a.size() != items.size())
    throw std::invalid_argument("summary and truth disagree on the number of items");
  if (theta_mean.size() != true_theta.size() || true_theta.size() != truth.n_subjects)
    throw std::invalid_argument("estimated and true abilities disagree in length");
  RecoveryReport r;
  auto fill = [](ParameterRecovery& p) {
    p.rmse = rmse(p.truth, p.estimate);
    p.pearson = p.truth.size() >= 2 ? pearson(p.truth, p.estimate) : kNaN;
  };
  r.a.truth = truth.true_a;
  r.b.truth = truth.true_b;
  for (const auto& it : items) {
    r.a.estimate.push_back(it.post_mean_a);
    r.b.estimate.push_back(it.post_mean_b);
  }
  r.theta.truth.assign(true_theta.begin(), true_theta.end());
  r.theta.estimate.assign(theta_mean.begin(), theta_mean.end());
  fill(r.a);
  fill(r.b);
  fill(r.theta);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double g = truth.true_gamma[i];
    const Component t = g == 0.0 ? Component::symmetric : (g < 0.0 ? Component::negative : Component::positive);
    ++r.confusion[index(t)][index(items[i].classification)];
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Moments {
  std::size_t m = 0, n = 0;
  std::vector<double> means;
  double w = 0.0;         // mean within-chain variance
  double var_plus = 0.0;  // pooled variance estimate
};

Moments moments(std::span<const std::vector<double>> chains) {
  Moments mo;
  mo.m = chains.size();
  mo.n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) mo.n = std::min(mo.n, c.size());
  if (mo.m == 0 || mo.n < 2) throw std::invalid_argument("need chains with at least 2 draws");
  const double n = static_cast<double>(mo.n);
  double grand = 0.0;
  for (const auto& c : chains) {
    const double mu = std::accumulate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(mo.n), 0.0) / n;
    double ss = 0.0;
    for (std::size_t t = 0; t < mo.n; ++t) ss += (c[t] - mu) * (c[t] - mu);
    mo.means.push_back(mu);
    mo.w += ss / (n - 1.0);
    grand += mu;
  }
  mo.w /= static_cast<double>(mo.m);
  grand /= static_cast<double>(mo.m);
  double b_over_n = 0.0;
  if (mo.m > 1) {
    for (double mu : mo.means) b_over_n += (mu - grand) * (mu - grand);
    b_over_n /= static_cast<double>(mo.m - 1);
  }
  mo.var_plus = (n - 1.0) / n * mo.w + b_over_n;
  return mo;
}

}  // namespace

double effective_sample_size(std::span<const std::vector<double>> chains) {
  const Moments mo = moments(chains);
  const double total = static_cast<double>(mo.m * mo.n);
  if (!(mo.var_plus > 0.0)) return total;
  const double n = static_cast<double>(mo.n);

  auto rho = [&](std::size_t lag) {
    double acov = 0.0;
    for (std::size_t k = 0; k < mo.m; ++k) {
      const auto& c = chains[k];
      const double mu = mo.means[k];
      double s = 0.0;
      for (std::size_t t = 0; t + lag < mo.n; ++t) s += (c[t] - mu) * (c[t + lag] - mu);
      acov += s / n;
    }
    acov /= static_cast<double>(mo.m);
    return 1.0 - (mo.w - acov) / mo.var_plus;
  };

  // Geyer: sum consecutive pairs while positive, forcing them to be monotone.
  double rho_even = 1.0;
  double rho_odd = mo.n > 1 ? rho(1) : 0.0;
  double sum_pairs = 0.0;
  double prev_pair = rho_even + rho_odd;
  std::size_t lag = 0;
  while (true) {
    double pair = rho_even + rho_odd;
    if (!(pair > 0.0)) break;
    pair = std::min(pair, prev_pair);
    sum_pairs += pair;
    prev_pair = pair;
    lag += 2;
    if (lag + 1 >= mo.n) break;
    rho_even = rho(lag);
    rho_odd = rho(lag + 1);
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / std::log10(total));
  return total / tau;
}

double split_rhat(std::span<const std::vector<double>> chains) {
  std::vector<std::vector<double>> halves;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (chains.empty() || n < 4) throw std::invalid_argument("split-R-hat needs chains with at least 4 draws");
  const std::size_t h = n / 2;
  for (const auto& c : chains) {
    // Drop the middle draw of an odd-length chain.
    halves.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(h));
    halves.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(n - h), c.begin() + static_cast<std::ptrdiff_t>(n));
  }
  const Moments mo = moments(halves);
  if (!(mo.w > 0.0)) return kNaN;
  return std::sqrt(mo.var_plus / mo.w);
}

ChainDiagnostics diagnostics(std::span<const DrawStore> stores, bool include_theta) {
  check_stores(stores);
  for (const auto& s : stores) {
    if (s.draws.size() < 4) throw std::invalid_argument("diagnostics need at least 4 draws per chain");
  }
  ChainDiagnostics out;
  for (const auto& s : stores) out.acceptance.push_back(s.acceptance);

  auto add = [&](std::string name, const std::function<double(const Draw&)>& get) {
    std::vector<std::vector<double>> chains;
    bool constant = true;
    const double first = get(stores.front().draws.front());
    for (const auto& s : stores) {
      auto& c = chains.emplace_back();
      c.reserve(s.draws.size());
      for (const auto& d : s.draws) {
        c.push_back(get(d));
        constant = constant && c.back() == first;
      }
    }
    ParameterDiagnostic p;
    p.name = std::move(name);
    p.constant = constant;
    if (constant) {
      std::size_t total = 0;
      for (const auto& c : chains) total += c.size();
      p.ess = static_cast<double>(total);
      p.rhat = kNaN;
    } else {
      p.ess = effective_sample_size(chains);
      p.rhat = split_rhat(chains);
    }
    out.parameters.push_back(std::move(p));
  };

  const std::size_t n_items = stores.front().n_items();
  for (std::size_t i = 0; i < n_items; ++i) {
    const std::string idx = "[" + std::to_string(i + 1) + "]";
    add("a" + idx, [i](const Draw& d) { return d.items[i].a; });
    add("b" + idx, [i](const Draw& d) { return d.items[i].b; });
    add("c" + idx, [i](const Draw& d) { return d.items[i].c; });
    add("gamma" + idx, [i](const Draw& d) { return d.items[i].gamma(); });
    add("gamma_neg" + idx, [i](const Draw& d) { return d.items[i].gamma_neg; });
    add("gamma_pos" + idx, [i](const Draw& d) { return d.items[i].gamma_pos; });
    for (std::size_t k = 0; k < 3; ++k) {
      add("w" + std::to_string(k) + idx, [i, k](const Draw& d) { return d.items[i].w[k]; });
    }
  }
  if (include_theta) {
    for (std::size_t j = 0; j < stores.front().n_subjects; ++j) {
      add("theta[" + std::to_string(j + 1) + "]", [j](const Draw& d) { return d.theta[j]; });
    }
  }
  return out;
}

}  // namespace skewirt

#include "skewirt/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>

#include "skewirt/errors.hpp"
#include "skewirt/format.hpp"

namespace skewirt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = value.find(',', start);
    out.push_back(trim(value.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Context {
  const std::string& source;
  std::size_t line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError(source + ":" + std::to_string(line) + ": " + key + ": " + what);
  }
};

double to_double(const Context& ctx, const std::string& v) {
  double out;
  if (!parse_double(v, out)) ctx.fail("'" + v + "' is not a number");
  return out;
}

template <std::size_t N>
std::array<double, N> to_doubles(const Context& ctx, const std::string& v) {
  const auto parts = split_list(v);
  if (parts.size() != N) ctx.fail("expected " + std::to_string(N) + " comma-separated numbers");
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = to_double(ctx, parts[k]);
  return out;
}

template <typename Int>
Int to_int(const Context& ctx, const std::string& v) {
  Int out;
  if (!parse_int(v, out)) ctx.fail("'" + v + "' is not a non-negative integer");
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  try {
    priors.validate();
    tuning.validate();
    mcmc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  if (data.responses.empty()) throw UsageError("invalid configuration: data.responses is required");
  if (model == ModelKind::three_param_fixed_c && data.fixed_c.empty())
    throw UsageError("invalid configuration: model 3pcsp-fixed-c needs data.fixed_c");
  if (model != ModelKind::three_param_fixed_c && !data.fixed_c.empty())
    throw UsageError("invalid configuration: data.fixed_c is only used by model 3pcsp-fixed-c");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source) {
  RunConfig cfg;
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  using Setter = std::function<void(const Context&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"model",
       [&](const Context& c, const std::string& v) {
         try {
           cfg.model = model_kind_from_string(v);
         } catch (const std::invalid_argument& e) {
           c.fail(e.what());
         }
       }},
      {"priors.dirichlet", [&](const Context& c, const std::string& v) { cfg.priors.dirichlet = to_doubles<3>(c, v); }},
      {"priors.beta_skew",
       [&](const Context& c, const std::string& v) {
         const auto ab = to_doubles<2>(c, v);
         cfg.priors.skew_alpha = ab[0];
         cfg.priors.skew_beta = ab[1];
       }},
      {"priors.mu_a", [&](const Context& c, const std::string& v) { cfg.priors.mu_a = to_double(c, v); }},
      {"priors.sigma_a", [&](const Context& c, const std::string& v) { cfg.priors.sigma_a = to_double(c, v); }},
      {"priors.mu_b", [&](const Context& c, const std::string& v) { cfg.priors.mu_b = to_double(c, v); }},
      {"priors.sigma_b", [&](const Context& c, const std::string& v) { cfg.priors.sigma_b = to_double(c, v); }},
      {"priors.beta_guess",
       [&](const Context& c, const std::string& v) {
         const auto ab = to_doubles<2>(c, v);
         cfg.priors.guess_alpha = ab[0];
         cfg.priors.guess_beta = ab[1];
       }},
      {"tuning.tau_gamma_neg", [&](const Context& c, const std::string& v) { cfg.tuning.tau_gamma_neg = to_double(c, v); }},
      {"tuning.tau_gamma_pos", [&](const Context& c, const std::string& v) { cfg.tuning.tau_gamma_pos = to_double(c, v); }},
      {"tuning.sigma_ab", [&](const Context& c, const std::string& v) { cfg.tuning.sigma_ab = to_doubles<3>(c, v); }},
      {"tuning.sigma_theta", [&](const Context& c, const std::string& v) { cfg.tuning.sigma_theta = to_double(c, v); }},
      {"tuning.adapt_target", [&](const Context& c, const std::string& v) { cfg.tuning.adapt_target = to_double(c, v); }},
      {"tuning.adapt_target_ab",
       [&](const Context& c, const std::string& v) { cfg.tuning.adapt_target_ab = to_double(c, v); }},
      {"tuning.adapt_window",
       [&](const Context& c, const std::string& v) { cfg.tuning.adapt_window = to_int<std::size_t>(c, v); }},
      {"mcmc.iterations", [&](const Context& c, const std::string& v) { cfg.mcmc.iterations = to_int<std::size_t>(c, v); }},
      {"mcmc.burnin", [&](const Context& c, const std::string& v) { cfg.mcmc.burnin = to_int<std::size_t>(c, v); }},
      {"mcmc.thin", [&](const Context& c, const std::string& v) { cfg.mcmc.thin = to_int<std::size_t>(c, v); }},
      {"mcmc.chains", [&](const Context& c, const std::string& v) { cfg.mcmc.chains = to_int<std::size_t>(c, v); }},
      {"mcmc.seed", [&](const Context& c, const std::string& v) { cfg.mcmc.seed = to_int<std::uint64_t>(c, v); }},
      {"data.responses", [&](const Context&, const std::string& v) { cfg.data.responses = path(v); }},
      {"data.fixed_c", [&](const Context&, const std::string& v) { cfg.data.fixed_c = v.empty() ? std::filesystem::path{} : path(v); }},
      {"data.exclude_items", [&](const Context&, const std::string& v) { cfg.data.exclude_items = split_list(v); }},
  };

  std::set<std::string> seen;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError(source + ":" + std::to_string(n) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const Context ctx{source, n, key};
    const auto it = setters.find(key);
    if (it == setters.end()) ctx.fail("unknown key");
    if (!seen.insert(key).second) ctx.fail("repeated key");
    it->second(ctx, value);
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path(), path.string());
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& [k, v] : describe_run(cfg.model, cfg.priors, cfg.tuning, cfg.mcmc)) out << k << " = " << v << '\n';
  out << "data.responses = " << cfg.data.responses.string() << '\n';
  out << "data.fixed_c = " << cfg.data.fixed_c.string() << '\n';
  out << "data.exclude_items = " << join(cfg.data.exclude_items) << '\n';
}

}  // namespace skewirt

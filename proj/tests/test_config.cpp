#include <doctest.h>

#include <sstream>

#include "skewirt/config.hpp"
#include "skewirt/errors.hpp"

using namespace skewirt;

namespace {

RunConfig parse(const std::string& text, const std::filesystem::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base, "test.conf");
}

std::string usage_error(const std::string& text) {
  try {
    parse(text);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

std::string written(const RunConfig& c) {
  std::ostringstream out;
  write_config(out, c);
  return out.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const auto c = parse("data.responses = r.csv\n");
  CHECK(c.model == ModelKind::two_param);
  CHECK(c.priors.mu_a == 1.0);
  CHECK(c.priors.sigma_a == 0.7);
  CHECK(c.priors.mu_b == 0.0);
  CHECK(c.priors.sigma_b == 1.0);
  CHECK(c.priors.dirichlet == std::array<double, 3>{0.1, 0.01, 0.01});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("values and comments") {
  const auto c = parse(
      "# a comment\n"
      "model = 3pcsp   # trailing\n"
      "priors.dirichlet = 0.05, 0.01, 0.01\n"
      "priors.beta_guess = 2, 8\n"
      "tuning.sigma_ab = 0.01, 0.002, 0.02\n"
      "mcmc.iterations = 200\n"
      "mcmc.burnin = 100\n"
      "mcmc.thin = 1\n"
      "mcmc.chains = 2\n"
      "mcmc.seed = 18446744073709551615\n"
      "data.responses = sub/r.csv\n"
      "data.exclude_items = q8, q9\n",
      "/base");
  CHECK(c.model == ModelKind::three_param);
  CHECK(c.priors.dirichlet == std::array<double, 3>{0.05, 0.01, 0.01});
  CHECK(c.priors.guess_alpha == 2.0);
  CHECK(c.priors.guess_beta == 8.0);
  CHECK(c.tuning.sigma_ab[1] == 0.002);
  CHECK(c.mcmc.seed == 18446744073709551615ull);
  CHECK(c.mcmc.chains == 2);
  CHECK(c.data.responses == std::filesystem::path("/base/sub/r.csv"));
  CHECK(c.data.exclude_items == std::vector<std::string>{"q8", "q9"});
  CHECK(parse("data.responses = /abs/r.csv\n", "/base").data.responses == std::filesystem::path("/abs/r.csv"));
}

TEST_CASE("round trip") {
  auto c = parse("model = 3pcsp-fixed-c\npriors.sigma_b = 0.30000000000000004\nmcmc.seed = 9\n"
                 "data.responses = /x/r.csv\ndata.fixed_c = /x/c.csv\ndata.exclude_items = a, b\n");
  const std::string text = written(c);
  const auto back = parse(text);
  CHECK(written(back) == text);
  CHECK(back.priors.sigma_b == 0.30000000000000004);
  CHECK(back.data.fixed_c == c.data.fixed_c);
  CHECK(back.data.exclude_items == c.data.exclude_items);
  CHECK(back.model == ModelKind::three_param_fixed_c);
}

TEST_CASE("errors") {
  CHECK(usage_error("mcmc.iteratons = 5\n").find("test.conf:1: mcmc.iteratons: unknown key") != std::string::npos);
  CHECK(usage_error("mcmc.seed = 1\nmcmc.seed = 2\n").find(":2: mcmc.seed: repeated key") != std::string::npos);
  CHECK(!usage_error("mcmc.thin = -1\n").empty());
  CHECK(!usage_error("mcmc.thin = 1.5\n").empty());
  CHECK(!usage_error("priors.sigma_a = abc\n").empty());
  CHECK(!usage_error("priors.dirichlet = 1, 2\n").empty());
  CHECK(!usage_error("model = 4pl\n").empty());
  CHECK(!usage_error("just some words\n").empty());

  CHECK_THROWS_AS(parse("").validate(), UsageError);
  CHECK_THROWS_AS(parse("data.responses = r\nmodel = 3pcsp-fixed-c\n").validate(), UsageError);
  CHECK_THROWS_AS(parse("data.responses = r\ndata.fixed_c = c\n").validate(), UsageError);
  CHECK_THROWS_AS(parse("data.responses = r\nmcmc.burnin = 20000\n").validate(), UsageError);
  CHECK_THROWS_AS(parse("data.responses = r\npriors.sigma_a = 0\n").validate(), UsageError);
  CHECK_THROWS_AS(parse("data.responses = r\nmcmc.chains = 0\n").validate(), UsageError);
  CHECK_THROWS_AS(read_config("/nonexistent/fit.conf"), UsageError);
}

}  // TEST_SUITE

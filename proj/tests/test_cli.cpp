#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "skewirt/errors.hpp"
#include "temp_dir.hpp"

using testutil::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SKEWIRT_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::pair<double, double>> curve(double gamma, double from, double to, int points) {
  std::ostringstream args;
  args.precision(17);
  args << "icc-curve --a 1 --b 0 --c 0 --gamma " << gamma << " --from " << from << " --to " << to
       << " --points " << points;
  const auto r = run(args.str());
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,p");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  CHECK(rows.size() == static_cast<std::size_t>(points));
  return rows;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("icc-curve") {
  const auto mid = curve(0.0, 0.0, 0.0, 1);
  CHECK(mid[0].second == 0.5);

  const auto sym = curve(0.0, -4, 4, 161);
  const auto skew = curve(0.9, -4, 4, 161);
  const auto mild = curve(0.4, -4, 4, 161);
  double gap09 = 0, gap04 = 0;
  for (std::size_t k = 0; k < sym.size(); ++k) {
    const double th = sym[k].first;
    CHECK(sym[k].second == doctest::Approx(oracle::Phi(th)).epsilon(1e-12));
    CHECK(std::abs(skew[k].second - oracle::csn_cdf(th, 0.9)) < 1e-12);
    // Below the symmetric curve exactly where the oracle says so.
    const double odiff = oracle::csn_cdf(th, 0.9) - oracle::Phi(th);
    if (th < 0 && std::abs(odiff) > 1e-9) CHECK((skew[k].second < sym[k].second) == (odiff < 0));
    gap09 = std::max(gap09, std::abs(skew[k].second - sym[k].second));
    gap04 = std::max(gap04, std::abs(mild[k].second - sym[k].second));
  }
  CHECK(gap04 < gap09);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("icc-curve --gamma 0.999").code == 2);
  CHECK(run("icc-curve --a -1").code == 2);
  CHECK(run("icc-curve --points 0").code == 2);
  CHECK(run("simulate --preset nope --subjects 10 --seed 1 --out /tmp/x").code == 2);
  CHECK(run("fit --config /nonexistent/fit.conf --out /tmp/x").code == 2);
  CHECK(run("summarize --draws /nonexistent --out /tmp/x.csv").code == 3);

  TempDir dir;
  write(dir / "bad.csv", "id,q1,q2\ns1,0,NA\n");
  write(dir / "bad.conf", "data.responses = bad.csv\nmcmc.iterations = 10\nmcmc.burnin = 0\nmcmc.thin = 1\n");
  CHECK(run("fit --config " + (dir / "bad.conf").string() + " --out " + (dir / "o").string()).code == 3);
  write(dir / "typo.conf", "data.response = bad.csv\n");
  CHECK(run("fit --config " + (dir / "typo.conf").string() + " --out " + (dir / "o").string()).code == 2);

  using skewirt::classify;
  CHECK(classify(std::make_exception_ptr(skewirt::UsageError("u"))).code == 2);
  CHECK(classify(std::make_exception_ptr(skewirt::DataError("d"))).code == 3);
  CHECK(classify(std::make_exception_ptr(skewirt::NumericalError("n"))).code == 4);
  CHECK(classify(std::make_exception_ptr(std::domain_error("g"))).code == 2);
}

TEST_CASE("simulate, fit, summarize, diagnose") {
  TempDir dir;
  const auto sim = dir / "sim";
  REQUIRE(run("simulate --preset all-asymmetric-40 --subjects 60 --seed 4 --out " + sim.string()).code == 0);
  // Shorten the generated run configuration.
  std::ifstream in(sim / "fit.conf");
  std::string text, line;
  while (std::getline(in, line)) {
    if (line.rfind("mcmc.", 0) == 0) continue;
    text += line + "\n";
  }
  text += "mcmc.iterations = 60\nmcmc.burnin = 20\nmcmc.thin = 2\nmcmc.chains = 2\nmcmc.seed = 3\n";
  write(sim / "fit.conf", text);

  const auto draws = dir / "draws";
  REQUIRE(run("fit --config " + (sim / "fit.conf").string() + " --out " + draws.string() + " --exclude item8").code == 0);
  CHECK(std::filesystem::exists(draws / "chain-1.draws"));
  CHECK(std::filesystem::exists(draws / "chain-2.draws"));

  const auto summary = dir / "summary.csv";
  const auto r = run("summarize --draws " + draws.string() + " --out " + summary.string());
  CHECK(r.code == 0);
  std::ifstream s(summary);
  std::size_t rows = 0;
  bool saw8 = false;
  while (std::getline(s, line)) {
    ++rows;
    if (line.rfind("item8,", 0) == 0) saw8 = true;
  }
  CHECK(rows == 40);  // header plus 39 items
  CHECK(!saw8);

  CHECK(run("diagnose --draws " + draws.string()).code == 0);
  CHECK(run("fit --config " + (sim / "fit.conf").string() + " --out " + draws.string() + " --exclude nosuch").code != 0);
}

}  // TEST_SUITE

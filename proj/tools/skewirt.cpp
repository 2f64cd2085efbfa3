// Command-line front end: simulate, fit, summarize, diagnose, icc-curve.
// Exit codes: 0 success, 2 usage, 3 data, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewirt/config.hpp"
#include "skewirt/errors.hpp"
#include "skewirt/format.hpp"
#include "skewirt/io.hpp"
#include "skewirt/sampler.hpp"
#include "skewirt/summary.hpp"
#include "skewirt/synthgen.hpp"

namespace fs = std::filesystem;
using namespace skewirt;

namespace {

constexpr int kOk = kExitOk;
constexpr int kUsage = kExitUsage;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory '" + dir.string() + "'");
}

int cmd_simulate(const std::string& name, std::size_t subjects, std::uint64_t seed, const fs::path& out) {
  if (subjects == 0) throw UsageError("--subjects must be positive");
  Scenario s;
  try {
    s = preset(name, subjects, seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SyntheticData data = generate(s);
  ensure_dir(out);
  io::write_responses(out / "responses.csv", data.responses);
  io::write_truth(out, s, data);

  RunConfig cfg;
  cfg.data.responses = "responses.csv";
  std::ofstream conf(out / "fit.conf");
  write_config(conf, cfg);
  if (!conf) throw DataError("cannot write '" + (out / "fit.conf").string() + "'");
  std::cout << "wrote " << s.n_items << " x " << s.n_subjects << " responses to " << (out / "responses.csv").string()
            << '\n';
  return kOk;
}

int cmd_fit(const fs::path& config_path, const fs::path& out, const std::vector<std::string>& exclude) {
  RunConfig cfg = read_config(config_path);
  for (const auto& id : exclude) cfg.data.exclude_items.push_back(id);
  cfg.validate();

  ResponseMatrix y = io::read_responses(cfg.data.responses);
  if (!cfg.data.exclude_items.empty()) {
    try {
      y = y.without_items(cfg.data.exclude_items);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (y.n_items() == 0) throw UsageError("every item is excluded");
  std::vector<double> fixed_c;
  if (cfg.model == ModelKind::three_param_fixed_c) fixed_c = io::read_fixed_c(cfg.data.fixed_c, y.item_ids);

  const auto stores = run_chains(y, cfg.priors, cfg.tuning, cfg.mcmc, cfg.model, fixed_c);
  ensure_dir(out);
  for (const auto& s : stores) io::write_draws(io::draws_path(out, s.chain), s);
  {
    std::ofstream conf(out / "run.conf");
    write_config(conf, cfg);
  }
  for (const auto& s : stores) {
    std::cout << "chain " << s.chain << ": " << s.draws.size() << " draws; acceptance";
    for (std::size_t b = 0; b < kBlockCount; ++b) {
      if (s.acceptance[b].proposed == 0) continue;
      std::cout << ' ' << to_string(static_cast<Block>(b)) << '=' << format_double(s.acceptance[b].rate());
    }
    std::cout << '\n';
  }
  return kOk;
}

int cmd_summarize(const fs::path& draws, const fs::path& out, double level, const fs::path& truth_dir) {
  const auto stores = io::read_draws_dir(draws);
  std::vector<ItemSummary> items;
  try {
    items = summarize_items(stores, level);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  {
    std::ofstream f(out);
    if (!f) throw DataError("cannot write '" + out.string() + "'");
    io::write_summary(f, items);
    if (!f) throw DataError("write to '" + out.string() + "' failed");
  }
  if (!truth_dir.empty()) {
    const io::Truth t = io::read_truth(truth_dir);
    RecoveryReport r;
    try {
      r = recovery_report(items, posterior_mean_theta(stores), t.scenario, t.theta);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    std::cout << "parameter,rmse,pearson\n";
    std::cout << "a," << format_double(r.a.rmse) << ',' << format_double(r.a.pearson) << '\n';
    std::cout << "b," << format_double(r.b.rmse) << ',' << format_double(r.b.pearson) << '\n';
    std::cout << "theta," << format_double(r.theta.rmse) << ',' << format_double(r.theta.pearson) << '\n';
    const char* names[3] = {"symmetric", "negative", "positive"};
    std::cout << "truth\\estimate,symmetric,negative,positive\n";
    for (int t0 = 0; t0 < 3; ++t0) {
      std::cout << names[t0];
      for (int e = 0; e < 3; ++e) std::cout << ',' << r.confusion[t0][e];
      std::cout << '\n';
    }
  }
  return kOk;
}

int cmd_diagnose(const fs::path& draws, bool theta) {
  const auto stores = io::read_draws_dir(draws);
  ChainDiagnostics d;
  try {
    d = diagnostics(stores, theta);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  std::cout << "parameter,ess,rhat,note\n";
  for (const auto& p : d.parameters) {
    std::cout << p.name << ',' << format_double(p.ess) << ',' << (p.constant ? "NA" : format_double(p.rhat)) << ','
              << (p.constant ? "constant" : "") << '\n';
  }
  std::cout << "\nchain,block,proposed,accepted,rate\n";
  for (std::size_t k = 0; k < d.acceptance.size(); ++k) {
    for (std::size_t b = 0; b < kBlockCount; ++b) {
      const auto& s = d.acceptance[k][b];
      std::cout << stores[k].chain << ',' << to_string(static_cast<Block>(b)) << ',' << s.proposed << ','
                << s.accepted << ',' << format_double(s.rate()) << '\n';
    }
  }
  return kOk;
}

int cmd_icc_curve(double a, double b, double c, double gamma, double from, double to, std::size_t points) {
  if (!(a > 0.0)) throw UsageError("--a must be positive");
  if (!(c >= 0.0 && c < 1.0)) throw UsageError("--c must lie in [0, 1)");
  if (!csn::Skewness::admissible(gamma)) throw UsageError("--gamma must lie in (-0.99527, 0.99527)");
  if (points == 0 || !(to >= from) || (points == 1) != (to == from))
    throw UsageError("need --to > --from with --points >= 2, or --to = --from with --points 1");
  const csn::Skewness g(gamma);
  std::cout << "theta,p\n";
  for (std::size_t k = 0; k < points; ++k) {
    const double theta =
        points == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(points - 1);
    std::cout << format_double(theta) << ',' << format_double(icc(predictor(a, b, theta), g, c)) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centred skew-probit IRT: simulate, fit, summarise"};
  app.require_subcommand(1);

  std::string preset_name;
  std::size_t subjects = 0;
  std::uint64_t seed = 1;
  std::string out_dir;
  auto* sim = app.add_subcommand("simulate", "Generate a preset scenario with known truth");
  sim->add_option("--preset", preset_name, "all-symmetric-40 or all-asymmetric-40")->required();
  sim->add_option("--subjects", subjects, "Number of subjects")->required();
  sim->add_option("--seed", seed, "Seed for abilities and responses")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();

  std::string config_path, fit_out;
  std::vector<std::string> exclude;
  auto* fit = app.add_subcommand("fit", "Run the sampler");
  fit->add_option("--config", config_path, "Run configuration")->required();
  fit->add_option("--out", fit_out, "Directory for the draw files")->required();
  fit->add_option("--exclude", exclude, "Item ids to leave out")->delimiter(',');

  std::string draws_dir, summary_out, truth_dir;
  double level = 0.95;
  auto* sum = app.add_subcommand("summarize", "Item table from draw files");
  sum->add_option("--draws", draws_dir, "Directory of draw files")->required();
  sum->add_option("--out", summary_out, "Summary CSV")->required();
  sum->add_option("--level", level, "Credible level")->check(CLI::Range(0.0, 1.0));
  sum->add_option("--truth", truth_dir, "Simulation directory; prints recovery statistics");

  std::string diag_dir;
  bool diag_theta = false;
  auto* diag = app.add_subcommand("diagnose", "ESS, split-R-hat and acceptance rates");
  diag->add_option("--draws", diag_dir, "Directory of draw files")->required();
  diag->add_flag("--theta", diag_theta, "Include abilities");

  double ia = 1.0, ib = 0.0, ic = 0.0, ig = 0.0, from = -4.0, to = 4.0;
  std::size_t points = 81;
  auto* curve = app.add_subcommand("icc-curve", "Tabulate an item characteristic curve");
  curve->add_option("--a", ia, "Discrimination");
  curve->add_option("--b", ib, "Difficulty");
  curve->add_option("--c", ic, "Guessing");
  curve->add_option("--gamma", ig, "Skewness");
  curve->add_option("--from", from, "First theta");
  curve->add_option("--to", to, "Last theta");
  curve->add_option("--points", points, "Grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(preset_name, subjects, seed, out_dir);
    if (*fit) return cmd_fit(config_path, fit_out, exclude);
    if (*sum) return cmd_summarize(draws_dir, summary_out, level, truth_dir);
    if (*diag) return cmd_diagnose(diag_dir, diag_theta);
    if (*curve) return cmd_icc_curve(ia, ib, ic, ig, from, to, points);
  } catch (const std::exception& e) {
    const auto status = classify(std::current_exception());
    std::cerr << status.label << ": " << e.what() << '\n';
    return status.code;
  }
  return kUsage;
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "skewirt/model.hpp"
#include "skewirt/sampler.hpp"
#include "skewirt/summary.hpp"
#include "skewirt/synthgen.hpp"

namespace skewirt::io {

// Response matrices: a header row "<label>,<item id>,...", then one row per
// subject "<subject id>,<0|1>,...". Comma, tab or semicolon delimited (taken
// from the header). Every problem is a DataError naming row and column.
ResponseMatrix parse_responses(std::istream& in, const std::string& source = "<input>");
ResponseMatrix read_responses(const std::filesystem::path& path);
void write_responses(std::ostream& out, const ResponseMatrix& y);
void write_responses(const std::filesystem::path& path, const ResponseMatrix& y);

// Fixed guessing values: header "item,c", then one row per item. Returned in
// the order of `item_ids`; every item must be listed exactly once.
std::vector<double> parse_fixed_c(std::istream& in, std::span<const std::string> item_ids,
                                  const std::string& source = "<input>");
std::vector<double> read_fixed_c(const std::filesystem::path& path, std::span<const std::string> item_ids);

// Draw files: '#' header lines (format version, chain, seed, model, sizes,
// item ids, config echo, acceptance counts), one tab-separated column header
// line, then one row per stored draw. Values use the shortest round-trip
// decimal form, so write followed by read is exact.
inline constexpr int kDrawsVersion = 1;
void write_draws(std::ostream& out, const DrawStore& store);
void write_draws(const std::filesystem::path& path, const DrawStore& store);
DrawStore parse_draws(std::istream& in, const std::string& source = "<input>");
DrawStore read_draws(const std::filesystem::path& path);

/// "chain-<k>.draws" inside `dir`.
std::filesystem::path draws_path(const std::filesystem::path& dir, std::uint32_t chain);
/// Every *.draws file in `dir`, ordered by chain id. DataError when none are
/// found or two files carry the same chain id.
std::vector<DrawStore> read_draws_dir(const std::filesystem::path& dir);

// Ground truth of a simulation: items.csv (item,a,b,c,gamma) and
// theta.csv (subject,theta), plus scenario.txt (subjects, seed).
void write_truth(const std::filesystem::path& dir, const Scenario& s, const SyntheticData& data);
struct Truth {
  Scenario scenario;
  std::vector<double> theta;
};
Truth read_truth(const std::filesystem::path& dir);

/// Item table with columns item, a, b, c, Z0, Z1, Z2, gamma, credible bounds
/// and the flag, comma separated.
void write_summary(std::ostream& out, std::span<const ItemSummary> items);

}  // namespace skewirt::io

#include "skewirt/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "skewirt/errors.hpp"
#include "skewirt/format.hpp"

namespace skewirt::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

[[noreturn]] void fail(const std::string& source, std::size_t row, std::size_t col, const std::string& what) {
  std::ostringstream msg;
  msg << source << ": row " << row;
  if (col) msg << ", column " << col;
  msg << ": " << what;
  throw DataError(msg.str());
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

char detect_delimiter(std::string_view header) {
  for (char d : {',', '\t', ';'}) {
    if (header.find(d) != std::string_view::npos) return d;
  }
  return ',';
}

}  // namespace

// ---------------------------------------------------------------------------
// Responses

ResponseMatrix parse_responses(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError(source + ": empty response file");
  const char delim = detect_delimiter(line);
  const auto header = split(line, delim);
  if (header.size() < 2) fail(source, row, 0, "header needs a subject column and at least one item");

  ResponseMatrix r;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string id(trim(header[c]));
    if (id.empty()) fail(source, row, c + 1, "empty item id");
    if (!seen.insert(id).second) fail(source, row, c + 1, "duplicate item id '" + id + "'");
    r.item_ids.push_back(std::move(id));
  }
  const std::size_t n_items = r.item_ids.size();

  std::vector<std::uint8_t> by_subject;  // subject-major while reading
  seen.clear();
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delim);
    if (cells.size() != n_items + 1) {
      fail(source, row, std::min(cells.size(), n_items + 1) + (cells.size() < n_items + 1 ? 1 : 0),
           "expected " + std::to_string(n_items + 1) + " cells, found " + std::to_string(cells.size()));
    }
    std::string id(trim(cells[0]));
    if (id.empty()) fail(source, row, 1, "empty subject id");
    if (!seen.insert(id).second) fail(source, row, 1, "duplicate subject id '" + id + "'");
    r.subject_ids.push_back(std::move(id));
    for (std::size_t c = 1; c <= n_items; ++c) {
      const auto cell = trim(cells[c]);
      if (cell == "0") {
        by_subject.push_back(0);
      } else if (cell == "1") {
        by_subject.push_back(1);
      } else if (cell.empty()) {
        fail(source, row, c + 1, "missing response");
      } else {
        fail(source, row, c + 1, "response '" + std::string(cell) + "' is not 0 or 1");
      }
    }
  }
  if (r.subject_ids.empty()) throw DataError(source + ": no subject rows");

  const std::size_t n_subjects = r.subject_ids.size();
  r.y = BinaryMatrix<ResponseTag>(n_items, n_subjects);
  for (std::size_t j = 0; j < n_subjects; ++j) {
    for (std::size_t i = 0; i < n_items; ++i) r.y(i, j) = by_subject[j * n_items + i];
  }
  return r;
}

ResponseMatrix read_responses(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_responses(in, path.string());
}

void write_responses(std::ostream& out, const ResponseMatrix& y) {
  out << "subject";
  for (const auto& id : y.item_ids) out << ',' << id;
  out << '\n';
  std::string row;
  for (std::size_t j = 0; j < y.n_subjects(); ++j) {
    row = y.subject_ids[j];
    for (std::size_t i = 0; i < y.n_items(); ++i) {
      row += ',';
      row += y.y(i, j) ? '1' : '0';
    }
    row += '\n';
    out << row;
  }
}

void write_responses(const std::filesystem::path& path, const ResponseMatrix& y) {
  auto out = open_out(path);
  write_responses(out, y);
  check_written(out, path);
}

// ---------------------------------------------------------------------------
// Fixed guessing values

std::vector<double> parse_fixed_c(std::istream& in, std::span<const std::string> item_ids,
                                  const std::string& source) {
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < item_ids.size(); ++i) where.emplace(item_ids[i], i);
  std::vector<double> c(item_ids.size(), -1.0);
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, detect_delimiter(line));
    if (cells.size() != 2) fail(source, row, 0, "expected 2 cells (item, c)");
    if (header) {
      header = false;
      if (trim(cells[0]) == "item") continue;  // header row is optional
    }
    const std::string id(trim(cells[0]));
    const auto it = where.find(id);
    if (it == where.end()) fail(source, row, 1, "unknown item '" + id + "'");
    double v;
    if (!parse_double(trim(cells[1]), v)) fail(source, row, 2, "not a number");
    if (!(v >= 0.0 && v < 1.0)) fail(source, row, 2, "c must lie in [0, 1)");
    if (c[it->second] >= 0.0) fail(source, row, 1, "item '" + id + "' listed twice");
    c[it->second] = v;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < 0.0) throw DataError(source + ": no guessing value for item '" + item_ids[i] + "'");
  }
  return c;
}

std::vector<double> read_fixed_c(const std::filesystem::path& path, std::span<const std::string> item_ids) {
  auto in = open_in(path);
  return parse_fixed_c(in, item_ids, path.string());
}

// ---------------------------------------------------------------------------
// Draws

namespace {

constexpr const char* kMagic = "skewirt-draws";
constexpr std::size_t kItemColumns = 9;
constexpr const char* kItemFields[kItemColumns] = {"a", "b", "c", "gamma_neg", "gamma_pos", "z", "w0", "w1", "w2"};

void check_label(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos)
    throw DataError(std::string(what) + " '" + s + "' cannot be stored (empty or contains tab/newline)");
}

}  // namespace

void write_draws(std::ostream& out, const DrawStore& store) {
  for (const auto& id : store.item_ids) check_label(id, "item id");
  out << "# " << kMagic << ' ' << kDrawsVersion << '\n';
  out << "# chain = " << store.chain << '\n';
  out << "# seed = " << store.seed << '\n';
  out << "# model = " << to_string(store.model) << '\n';
  out << "# n_items = " << store.n_items() << '\n';
  out << "# n_subjects = " << store.n_subjects << '\n';
  out << "# n_draws = " << store.draws.size() << '\n';
  out << "# item_ids =";
  for (const auto& id : store.item_ids) out << '\t' << id;
  out << '\n';
  for (const auto& [k, v] : store.config_echo) {
    check_label(k, "config key");
    if (v.find_first_of("\n\r") != std::string::npos) throw DataError("config value for '" + k + "' spans lines");
    out << "# config " << k << " = " << v << '\n';
  }
  for (std::size_t b = 0; b < kBlockCount; ++b) {
    out << "# acceptance " << to_string(static_cast<Block>(b)) << " = " << store.acceptance[b].proposed << ' '
        << store.acceptance[b].accepted << '\n';
  }
  out << "iteration\tchain";
  for (std::size_t i = 1; i <= store.n_items(); ++i) {
    for (const char* f : kItemFields) out << '\t' << f << '[' << i << ']';
  }
  for (std::size_t j = 1; j <= store.n_subjects; ++j) out << "\ttheta[" << j << ']';
  out << '\n';

  std::string row;
  for (const auto& d : store.draws) {
    if (d.items.size() != store.n_items() || d.theta.size() != store.n_subjects)
      throw std::invalid_argument("draw does not match the store dimensions");
    row = std::to_string(d.iteration);
    row += '\t';
    row += std::to_string(store.chain);
    for (const auto& it : d.items) {
      for (double v : {it.a, it.b, it.c, it.gamma_neg, it.gamma_pos}) {
        row += '\t';
        row += format_double(v);
      }
      row += '\t';
      row += std::to_string(index(it.z));
      for (double v : it.w) {
        row += '\t';
        row += format_double(v);
      }
    }
    for (double t : d.theta) {
      row += '\t';
      row += format_double(t);
    }
    row += '\n';
    out << row;
  }
}

void write_draws(const std::filesystem::path& path, const DrawStore& store) {
  auto out = open_out(path);
  write_draws(out, store);
  check_written(out, path);
}

DrawStore parse_draws(std::istream& in, const std::string& source) {
  DrawStore s;
  std::string line;
  std::size_t row = 0;
  auto next = [&](const char* expecting) {
    if (!std::getline(in, line)) throw DataError(source + ": truncated file (expected " + expecting + ")");
    ++row;
    line = strip_cr(std::move(line));
  };

  next("format line");
  {
    std::istringstream ls(line);
    std::string hash, magic;
    int version = 0;
    if (!(ls >> hash >> magic >> version) || hash != "#" || magic != kMagic) fail(source, row, 0, "not a draws file");
    if (version != kDrawsVersion)
      fail(source, row, 0, "draws format version " + std::to_string(version) + " is not supported (expected " +
                               std::to_string(kDrawsVersion) + ")");
  }

  std::size_t n_items = 0, n_draws = 0;
  bool have_items = false;
  std::map<std::string, std::string> fields;
  while (true) {
    next("column header");
    if (line.empty() || line[0] != '#') break;
    if (line.rfind("# item_ids =", 0) == 0) {
      have_items = true;
      const std::string_view ids = std::string_view(line).substr(12);
      if (!ids.empty()) {
        if (ids.front() != '\t') fail(source, row, 0, "malformed item id list");
        for (auto id : split(ids.substr(1), '\t')) s.item_ids.emplace_back(id);
      }
      continue;
    }
    const std::string_view body = std::string_view(line).substr(std::min<std::size_t>(2, line.size()));
    const std::size_t eq = body.find(" = ");
    if (eq == std::string_view::npos) fail(source, row, 0, "malformed header line");
    const std::string key(body.substr(0, eq));
    const std::string value(body.substr(eq + 3));
    if (key.rfind("config ", 0) == 0) {
      s.config_echo.emplace_back(key.substr(7), value);
    } else if (key.rfind("acceptance ", 0) == 0) {
      const std::string name = key.substr(11);
      std::size_t b = 0;
      while (b < kBlockCount && name != to_string(static_cast<Block>(b))) ++b;
      if (b == kBlockCount) fail(source, row, 0, "unknown block '" + name + "'");
      std::istringstream vs(value);
      if (!(vs >> s.acceptance[b].proposed >> s.acceptance[b].accepted)) fail(source, row, 0, "bad acceptance counts");
    } else {
      fields[key] = value;
    }
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw DataError(source + ": header lacks '" + key + "'");
    return it->second;
  };
  if (!parse_int(need("chain"), s.chain)) throw DataError(source + ": bad chain id");
  if (!parse_int(need("seed"), s.seed)) throw DataError(source + ": bad seed");
  try {
    s.model = model_kind_from_string(need("model"));
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
  if (!parse_int(need("n_items"), n_items) || !parse_int(need("n_subjects"), s.n_subjects) ||
      !parse_int(need("n_draws"), n_draws))
    throw DataError(source + ": bad dimensions");
  if (!have_items || s.item_ids.size() != n_items) throw DataError(source + ": item ids do not match n_items");

  const std::size_t n_cols = 2 + n_items * kItemColumns + s.n_subjects;
  if (split(line, '\t').size() != n_cols) fail(source, row, 0, "column header does not match the dimensions");

  s.draws.reserve(n_draws);
  for (std::size_t k = 0; k < n_draws; ++k) {
    next("draw rows");
    const auto cells = split(line, '\t');
    if (cells.size() != n_cols) fail(source, row, 0, "expected " + std::to_string(n_cols) + " cells, found " +
                                                          std::to_string(cells.size()));
    Draw d;
    std::uint32_t chain = 0;
    if (!parse_int(cells[0], d.iteration)) fail(source, row, 1, "bad iteration");
    if (!parse_int(cells[1], chain) || chain != s.chain) fail(source, row, 2, "chain id differs from the header");
    auto num = [&](std::size_t c) {
      double v;
      if (!parse_double(cells[c], v)) fail(source, row, c + 1, "not a number");
      return v;
    };
    d.items.resize(n_items);
    std::size_t c = 2;
    for (auto& it : d.items) {
      it.a = num(c++);
      it.b = num(c++);
      it.c = num(c++);
      it.gamma_neg = num(c++);
      it.gamma_pos = num(c++);
      int z = -1;
      if (!parse_int(cells[c], z) || z < 0 || z > 2) fail(source, row, c + 1, "z must be 0, 1 or 2");
      ++c;
      it.z = static_cast<Component>(z);
      for (double& w : it.w) w = num(c++);
    }
    d.theta.resize(s.n_subjects);
    for (double& t : d.theta) t = num(c++);
    s.draws.push_back(std::move(d));
  }
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) fail(source, row, 0, "more rows than n_draws");
  }
  return s;
}

DrawStore read_draws(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_draws(in, path.string());
}

std::filesystem::path draws_path(const std::filesystem::path& dir, std::uint32_t chain) {
  return dir / ("chain-" + std::to_string(chain) + ".draws");
}

std::vector<DrawStore> read_draws_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw DataError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".draws") files.push_back(e.path());
  }
  if (files.empty()) throw DataError("no .draws files in '" + dir.string() + "'");
  std::vector<DrawStore> stores;
  for (const auto& f : files) stores.push_back(read_draws(f));
  std::sort(stores.begin(), stores.end(), [](const DrawStore& x, const DrawStore& y) { return x.chain < y.chain; });
  for (std::size_t k = 1; k < stores.size(); ++k) {
    if (stores[k].chain == stores[k - 1].chain)
      throw DataError("two draw files carry chain id " + std::to_string(stores[k].chain));
    if (stores[k].item_ids != stores[0].item_ids || stores[k].n_subjects != stores[0].n_subjects)
      throw DataError("draw files disagree on items or subjects");
  }
  return stores;
}

// ---------------------------------------------------------------------------
// Truth

void write_truth(const std::filesystem::path& dir, const Scenario& s, const SyntheticData& data) {
  {
    const auto path = dir / "items.csv";
    auto out = open_out(path);
    out << "item,a,b,c,gamma\n";
    for (std::size_t i = 0; i < s.n_items; ++i) {
      out << data.responses.item_ids[i] << ',' << format_double(s.true_a[i]) << ',' << format_double(s.true_b[i])
          << ',' << format_double(s.true_c[i]) << ',' << format_double(s.true_gamma[i]) << '\n';
    }
    check_written(out, path);
  }
  {
    const auto path = dir / "theta.csv";
    auto out = open_out(path);
    out << "subject,theta\n";
    for (std::size_t j = 0; j < s.n_subjects; ++j)
      out << data.responses.subject_ids[j] << ',' << format_double(data.theta[j]) << '\n';
    check_written(out, path);
  }
  {
    const auto path = dir / "scenario.txt";
    auto out = open_out(path);
    out << "subjects = " << s.n_subjects << "\nseed = " << s.seed << '\n';
    check_written(out, path);
  }
}

Truth read_truth(const std::filesystem::path& dir) {
  auto read_table = [](const std::filesystem::path& path, std::size_t cols) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (row == 1 || trim(line).empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != cols) fail(path.string(), row, 0, "expected " + std::to_string(cols) + " cells");
      auto& r = rows.emplace_back();
      for (std::size_t c = 1; c < cols; ++c) {
        double v;
        if (!parse_double(trim(cells[c]), v)) fail(path.string(), row, c + 1, "not a number");
        r.push_back(v);
      }
    }
    return rows;
  };
  Truth t;
  for (const auto& r : read_table(dir / "items.csv", 5)) {
    t.scenario.true_a.push_back(r[0]);
    t.scenario.true_b.push_back(r[1]);
    t.scenario.true_c.push_back(r[2]);
    t.scenario.true_gamma.push_back(r[3]);
  }
  for (const auto& r : read_table(dir / "theta.csv", 2)) t.theta.push_back(r[0]);
  t.scenario.n_items = t.scenario.true_a.size();
  t.scenario.n_subjects = t.theta.size();
  {
    auto in = open_in(dir / "scenario.txt");
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      if (trim(std::string_view(line).substr(0, eq)) == "seed") {
        if (!parse_int(trim(std::string_view(line).substr(eq + 1)), t.scenario.seed))
          throw DataError((dir / "scenario.txt").string() + ": bad seed");
      }
    }
  }
  try {
    t.scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
  return t;
}

// ---------------------------------------------------------------------------

void write_summary(std::ostream& out, std::span<const ItemSummary> items) {
  out << "item,a,b,c,Z0,Z1,Z2,gamma,class,flag,a_lo,a_hi,b_lo,b_hi,c_lo,c_hi,gamma_lo,gamma_hi\n";
  const char* names[3] = {"symmetric", "negative", "positive"};
  for (const auto& s : items) {
    out << s.item_id << ',' << format_double(s.post_mean_a) << ',' << format_double(s.post_mean_b) << ','
        << format_double(s.post_mean_c) << ',' << format_double(s.z_probs[0]) << ',' << format_double(s.z_probs[1])
        << ',' << format_double(s.z_probs[2]) << ',' << format_double(s.gamma_est) << ','
        << names[index(s.classification)] << ',' << to_string(s.flag) << ',' << format_double(s.ci_a.lo) << ','
        << format_double(s.ci_a.hi) << ',' << format_double(s.ci_b.lo) << ',' << format_double(s.ci_b.hi) << ','
        << format_double(s.ci_c.lo) << ',' << format_double(s.ci_c.hi) << ',' << format_double(s.ci_gamma.lo)
        << ',' << format_double(s.ci_gamma.hi) << '\n';
  }
}

}  // namespace skewirt::io

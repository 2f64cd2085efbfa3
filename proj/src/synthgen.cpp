#include "skewirt/synthgen.hpp"

#include <stdexcept>

#include "skewirt/random.hpp"

namespace skewirt {

void Scenario::validate() const {
  if (n_items == 0 || n_subjects == 0) throw std::invalid_argument("scenario needs items and subjects");
  if (true_a.size() != n_items || true_b.size() != n_items || true_c.size() != n_items ||
      true_gamma.size() != n_items)
    throw std::invalid_argument("scenario vectors must have one entry per item");
  for (std::size_t i = 0; i < n_items; ++i) {
    if (!(true_a[i] > 0.0)) throw std::invalid_argument("true a must be positive");
    if (!(true_c[i] >= 0.0 && true_c[i] < 1.0)) throw std::invalid_argument("true c must lie in [0, 1)");
    if (!csn::Skewness::admissible(true_gamma[i])) throw std::invalid_argument("true gamma out of range");
  }
}

const std::vector<double>& asymmetric_gamma_grid() {
  static const std::vector<double> grid{
      -0.99, -0.99, -0.95, -0.93, -0.91, -0.90, -0.87, -0.83, -0.79, -0.74, -0.69, -0.63, -0.52, -0.39,
      -0.30, -0.21, -0.15, -0.11, -0.06, -0.02, 0.02,  0.04,  0.09,  0.14,  0.19,  0.24,  0.34,  0.44,
      0.60,  0.65,  0.71,  0.78,  0.81,  0.85,  0.88,  0.91,  0.92,  0.95,  0.98,  0.99};
  return grid;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"all-symmetric-40", "all-asymmetric-40"};
  return names;
}

Scenario preset(const std::string& name, std::size_t n_subjects, std::uint64_t seed) {
  constexpr std::size_t kItems = 40;
  Scenario s;
  if (name == "all-symmetric-40") {
    s.true_gamma.assign(kItems, 0.0);
  } else if (name == "all-asymmetric-40") {
    s.true_gamma = asymmetric_gamma_grid();
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  s.n_items = kItems;
  s.n_subjects = n_subjects;
  s.seed = seed;
  s.true_c.assign(kItems, 0.0);

  Rng rng(kPresetItemSeed);
  for (std::size_t i = 0; i < kItems; ++i) {
    double a;
    do {
      a = rng.normal(1.0, 0.7);
    } while (!(a > 0.0));
    s.true_a.push_back(a);
    s.true_b.push_back(rng.normal());
  }
  s.validate();
  return s;
}

SyntheticData generate(const Scenario& s) {
  s.validate();
  Rng rng(s.seed, 1);
  SyntheticData out;
  out.theta.resize(s.n_subjects);
  for (double& t : out.theta) t = rng.normal();

  std::vector<csn::Skewness> gamma;
  gamma.reserve(s.n_items);
  for (double g : s.true_gamma) gamma.emplace_back(g);

  BinaryMatrix<ResponseTag> y(s.n_items, s.n_subjects);
  for (std::size_t j = 0; j < s.n_subjects; ++j) {
    for (std::size_t i = 0; i < s.n_items; ++i) {
      const double p = icc(predictor(s.true_a[i], s.true_b[i], out.theta[j]), gamma[i], s.true_c[i]);
      y(i, j) = rng.uniform() < p ? 1 : 0;
    }
  }
  out.responses = make_responses(std::move(y));
  return out;
}

}  // namespace skewirt

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skewirt/csn.hpp"

namespace skewirt {

/// Skewness status of an item: the mixture component its indicator selects.
enum class Component : std::uint8_t { symmetric = 0, negative = 1, positive = 2 };

inline constexpr std::size_t index(Component c) { return static_cast<std::size_t>(c); }

enum class ModelKind {
  two_param,          // 2PCSP: c = 0, no guessing indicators
  three_param,        // 3PCSP with c sampled
  three_param_fixed_c // 3PCSP with c supplied as constants
};

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ItemState {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double gamma_neg = -0.5;
  double gamma_pos = 0.5;
  Component z = Component::symmetric;
  std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  /// Effective skewness selected by z.
  double gamma() const;
  double gamma_of(Component k) const;
  /// Throws std::invalid_argument when any field leaves its support.
  void validate() const;

  friend bool operator==(const ItemState&, const ItemState&) = default;
};

/// Item-major binary matrix: entry (i, j) is item i, subject j.
template <typename Tag>
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t n_items, std::size_t n_subjects, std::uint8_t fill = 0)
      : n_items_(n_items), n_subjects_(n_subjects), cells_(n_items * n_subjects, fill) {}

  std::size_t n_items() const { return n_items_; }
  std::size_t n_subjects() const { return n_subjects_; }

  std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells_[i * n_subjects_ + j]; }
  std::uint8_t& operator()(std::size_t i, std::size_t j) { return cells_[i * n_subjects_ + j]; }

  std::span<const std::uint8_t> row(std::size_t i) const {
    return {cells_.data() + i * n_subjects_, n_subjects_};
  }
  std::span<std::uint8_t> row(std::size_t i) { return {cells_.data() + i * n_subjects_, n_subjects_}; }

  const std::vector<std::uint8_t>& cells() const { return cells_; }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t n_items_ = 0;
  std::size_t n_subjects_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct ResponseTag {};
struct GuessTag {};

/// Observed responses Y plus labels.
struct ResponseMatrix {
  BinaryMatrix<ResponseTag> y;
  std::vector<std::string> item_ids;
  std::vector<std::string> subject_ids;

  std::size_t n_items() const { return y.n_items(); }
  std::size_t n_subjects() const { return y.n_subjects(); }

  /// Copy without the listed items (by id); throws on unknown ids.
  ResponseMatrix without_items(const std::vector<std::string>& ids) const;

  friend bool operator==(const ResponseMatrix&, const ResponseMatrix&) = default;
};

ResponseMatrix make_responses(BinaryMatrix<ResponseTag> y);

/// Guessing indicators D; d(i, j) = 1 requires y(i, j) = 1.
using AuxIndicators = BinaryMatrix<GuessTag>;

struct PriorConfig {
  std::array<double, 3> dirichlet{0.1, 0.01, 0.01};
  double skew_alpha = 1.0;  // truncated Beta on |gamma| over (0, kGammaMax)
  double skew_beta = 1.0;
  double mu_a = 1.0;
  double sigma_a = 0.7;
  double mu_b = 0.0;
  double sigma_b = 1.0;
  double guess_alpha = 5.0;
  double guess_beta = 17.0;

  void validate() const;
};

/// a (theta - b).
double predictor(double a, double b, double theta);

/// c + (1 - c) Phi_CSN(m, gamma).
double icc(double m, csn::Skewness gamma, double c);

/// sum_k w_k Phi_CSN(m, gamma_k) with gamma = (0, gamma_neg, gamma_pos).
double mixture_icc(double m, const std::array<double, 3>& w, double gamma_neg, double gamma_pos);

/// log P(Y | D, parameters): sum over pairs with d = 0 of the Bernoulli
/// log-probability under Phi_CSN; pairs with d = 1 contribute 0. Returns -inf
/// when a required probability is exactly 0.
double loglik(std::span<const ItemState> items, std::span<const double> theta,
              const ResponseMatrix& y, const AuxIndicators& d);

/// log P(Y, D | c, parameters): loglik plus the Bernoulli(c_i) terms of D.
/// -inf when some d_ij = 1 has y_ij = 0.
double log_augmented(std::span<const ItemState> items, std::span<const double> theta,
                     const ResponseMatrix& y, const AuxIndicators& d);

/// log P(Y | parameters) with D integrated out: Bernoulli terms of
/// c + (1 - c) Phi_CSN.
double loglik_marginal(std::span<const ItemState> items, std::span<const double> theta,
                       const ResponseMatrix& y);

/// log of the truncated Beta density of x on (0, kGammaMax).
double log_truncated_beta(double x, double alpha, double beta);

/// Log prior density of items and abilities: truncated normal a, normal b,
/// N(0, 1) theta, Dirichlet w, Multinomial(1, w) for z, truncated Beta for
/// gamma_pos and -gamma_neg, and Beta c when `estimate_c`. -inf outside the
/// support.
double log_prior(std::span<const ItemState> items, std::span<const double> theta,
                 const PriorConfig& config, bool estimate_c);

}  // namespace skewirt

#pragma once

// Likelihoods, marginals and conditionals over a WorldTable.
//
// A formula is interpreted on a model through a Bernoulli likelihood:
// p(a|m) = mu if m satisfies a, 1 - mu otherwise, and conditions are
// independent given the model. Strict semantics fixes mu = 1, Limit takes
// mu -> 1 in closed form, Fixed uses a rational mu strictly inside (0, 1).

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genlogic/formula.hpp"
#include "genlogic/rational.hpp"
#include "genlogic/worldstore.hpp"

namespace genlogic {

class Semantics {
 public:
  enum class Regime { Strict, Limit, Fixed };

  static Semantics strict() { return Semantics(Regime::Strict, 1); }
  static Semantics limit() { return Semantics(Regime::Limit, 1); }
  static Semantics fixed(Rational mu) {
    if (mu <= 0 || mu >= 1) throw Error("mu must lie strictly between 0 and 1, got " + format_rational(mu));
    return Semantics(Regime::Fixed, std::move(mu));
  }

  // "strict", "limit" or "mu=N/D".
  static Semantics parse(std::string_view text) {
    if (text == "strict") return strict();
    if (text == "limit") return limit();
    if (text.starts_with("mu=")) return fixed(parse_rational(text.substr(3)));
    throw Error("unknown semantics '" + std::string(text) + "' (expected strict, limit or mu=N/D)");
  }

  Regime regime() const { return regime_; }
  // 1 for Strict and Limit.
  const Rational& mu() const { return mu_; }

  std::string to_string() const {
    switch (regime_) {
      case Regime::Strict: return "strict";
      case Regime::Limit: return "limit";
      default: return "mu=" + format_rational(mu_);
    }
  }

  bool operator==(const Semantics&) const = default;

 private:
  Semantics(Regime r, Rational mu) : regime_(r), mu_(std::move(mu)) {}

  Regime regime_;
  Rational mu_;
};

// A probability in [0, 1], or Undefined with the reason.
class ProbResult {
 public:
  static ProbResult of(Rational p) {
    if (p < 0 || p > 1) throw std::logic_error("probability out of range: " + format_rational(p));
    return ProbResult(std::move(p), {});
  }
  static ProbResult undefined(std::string reason) { return ProbResult(std::nullopt, std::move(reason)); }

  bool defined() const { return value_.has_value(); }
  const Rational& value() const {
    if (!value_) throw std::logic_error("undefined probability: " + reason_);
    return *value_;
  }
  const std::string& reason() const { return reason_; }

  std::string to_string() const { return value_ ? format_rational(*value_) : "undefined"; }

  friend bool operator==(const ProbResult& a, const ProbResult& b) { return a.value_ == b.value_; }

 private:
  ProbResult(std::optional<Rational> v, std::string reason) : value_(std::move(v)), reason_(std::move(reason)) {}

  std::optional<Rational> value_;
  std::string reason_;
};

// |D|_m: how many members of the multiset hold in m.
inline std::size_t satisfied_count(std::span<const Formula> delta, const Model& m) {
  std::size_t s = 0;
  for (const Formula& f : delta) s += eval(f, m);
  return s;
}

// mu^s (1 - mu)^(|D| - s). mu = 0 and mu = 1 are allowed here (0^0 = 1).
inline Rational likelihood(std::span<const Formula> delta, const Model& m, const Rational& mu) {
  if (mu < 0 || mu > 1) throw Error("mu must lie in [0, 1], got " + format_rational(mu));
  const std::size_t s = satisfied_count(delta, m);
  return power(mu, s) * power(1 - mu, delta.size() - s);
}

// Sum of the prior over supported models satisfying alpha.
inline ProbResult marginal(const Formula& alpha, const WorldTable& table) {
  require_same_vocabulary(alpha.vocabulary(), table.vocabulary());
  Rational p = 0;
  for (std::size_t n = 0; n < table.size(); ++n)
    if (table.supported(n) && eval(alpha, table.rows()[n].model)) p += table.prior(n);
  return ProbResult::of(std::move(p));
}

// Data-sum form: (number of data whose model satisfies alpha) / K.
inline Rational marginal_by_data(const Formula& alpha, const WorldTable& table) {
  require_same_vocabulary(alpha.vocabulary(), table.vocabulary());
  if (table.mode() != PriorMode::Mle) throw DataError("marginal_by_data needs an MLE table");
  if (table.total() == 0) throw DataError("marginal_by_data needs at least one datum");
  Integer hits = 0;
  for (const auto& row : table.rows())
    if (eval(alpha, row.model)) hits += row.count;
  return Rational(hits, Integer(table.total()));
}

// p_{K+1}(alpha) from p_K(alpha) and the new datum's model.
inline Rational update_marginal(const Rational& p_k, std::uint64_t k, const Formula& alpha, const Model& datum) {
  const Rational kk(static_cast<long long>(k));
  return (kk * p_k + Rational(eval(alpha, datum) ? 1 : 0)) / (kk + 1);
}

namespace detail {

inline void require_vocabulary(const Formula& alpha, std::span<const Formula> delta, const WorldTable& table) {
  require_same_vocabulary(alpha.vocabulary(), table.vocabulary());
  for (const Formula& f : delta) require_same_vocabulary(f.vocabulary(), table.vocabulary());
}

}  // namespace detail

inline ProbResult conditional(const Formula& alpha, std::span<const Formula> delta, const WorldTable& table,
                              const Semantics& sem) {
  detail::require_vocabulary(alpha, delta, table);

  std::vector<std::size_t> counts(table.size(), 0);
  std::size_t best = 0;
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (!table.supported(n)) continue;
    counts[n] = satisfied_count(delta, table.rows()[n].model);
    best = std::max(best, counts[n]);
  }

  if (sem.regime() == Semantics::Regime::Fixed) {
    const Rational& mu = sem.mu();
    const Rational nu = 1 - mu;
    Rational num = 0, den = 0;
    for (std::size_t n = 0; n < table.size(); ++n) {
      if (!table.supported(n)) continue;
      const Rational w = table.prior(n) * power(mu, counts[n]) * power(nu, delta.size() - counts[n]);
      den += w;
      if (eval(alpha, table.rows()[n].model)) num += w * mu;
      else num += w * nu;
    }
    return ProbResult::of(num / den);
  }

  // Strict keeps the models of every condition. Limit keeps the models that
  // satisfy the most conditions: after dividing by (1 - mu)^(|D| - best),
  // every other model's weight carries a positive power of (1 - mu) and
  // vanishes in the limit.
  const std::size_t target = sem.regime() == Semantics::Regime::Strict ? delta.size() : best;
  Rational num = 0, den = 0;
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (!table.supported(n) || counts[n] != target) continue;
    const Rational w = table.prior(n);
    den += w;
    if (eval(alpha, table.rows()[n].model)) num += w;
  }
  if (den == 0) return ProbResult::undefined("no supported model satisfies every condition");
  return ProbResult::of(num / den);
}

inline ProbResult conditional(const Formula& alpha, std::initializer_list<Formula> delta, const WorldTable& table,
                              const Semantics& sem) {
  return conditional(alpha, std::span<const Formula>(delta.begin(), delta.size()), table, sem);
}

}  // namespace genlogic

#pragma once

// Brute-force reference implementations: model sets, entailment,
// consistency, maximal consistent subsets, approximate models and a
// full-joint conditional evaluator. Everything here enumerates; nothing
// calls into the inference engine except the theorem harness, which checks
// an engine against these routes.

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genlogic/formula.hpp"
#include "genlogic/inference.hpp"
#include "genlogic/rational.hpp"
#include "genlogic/worldstore.hpp"

namespace genlogic::oracle {

inline constexpr std::size_t kDefaultSubsetBound = 16;

class ModelSet {
 public:
  explicit ModelSet(VocabularyPtr vocab, std::set<Model> members = {})
      : vocab_(std::move(vocab)), members_(std::move(members)) {
    for (const Model& m : members_) require_same_vocabulary(vocab_, m.vocabulary());
  }

  const VocabularyPtr& vocabulary() const { return vocab_; }
  const std::set<Model>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(const Model& m) const { return members_.contains(m); }
  void insert(const Model& m) {
    require_same_vocabulary(vocab_, m.vocabulary());
    members_.insert(m);
  }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  ModelSet intersect(const ModelSet& other) const {
    ModelSet out(vocab_);
    for (const Model& m : members_)
      if (other.contains(m)) out.members_.insert(m);
    return out;
  }

  bool subset_of(const ModelSet& other) const {
    for (const Model& m : members_)
      if (!other.contains(m)) return false;
    return true;
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    for (const Model& m : members_) out.push_back(m.to_string());
    return out;
  }

  friend bool operator==(const ModelSet& a, const ModelSet& b) {
    return same_vocabulary(a.vocab_, b.vocab_) && a.members_ == b.members_;
  }

 private:
  VocabularyPtr vocab_;
  std::set<Model> members_;
};

inline ModelSet all_models(const VocabularyPtr& vocab, std::size_t max_atoms = kDefaultEnumerationBound) {
  const auto models = enumerate_models(vocab, max_atoms);
  return ModelSet(vocab, std::set<Model>(models.begin(), models.end()));
}

inline bool satisfies_all(std::span<const Formula> delta, const Model& m) {
  for (const Formula& f : delta)
    if (!eval(f, m)) return false;
  return true;
}

// Models in which every member of delta is true; all models when delta is empty.
inline ModelSet models_of(std::span<const Formula> delta, const VocabularyPtr& vocab,
                          std::size_t max_atoms = kDefaultEnumerationBound) {
  ModelSet out(vocab);
  for (const Model& m : enumerate_models(vocab, max_atoms))
    if (satisfies_all(delta, m)) out.insert(m);
  return out;
}

inline ModelSet models_of(std::initializer_list<Formula> delta, const VocabularyPtr& vocab) {
  return models_of(std::span<const Formula>(delta.begin(), delta.size()), vocab);
}

inline bool entails(std::span<const Formula> delta, const Formula& alpha, const VocabularyPtr& vocab) {
  const Formula a[] = {alpha};
  return models_of(delta, vocab).subset_of(models_of(a, vocab));
}

inline bool consistent(std::span<const Formula> delta, const VocabularyPtr& vocab) {
  return !models_of(delta, vocab).empty();
}

// Index sets of the maximum-cardinality subsets of delta that have a model
// in the universe. Scans cardinalities downward and stops at the first one
// admitting any such subset.
inline std::vector<std::vector<std::size_t>> max_consistent_subset_indices(std::span<const Formula> delta,
                                                                           std::span<const Model> universe,
                                                                           std::size_t subset_bound = kDefaultSubsetBound) {
  if (delta.size() > subset_bound || delta.size() > 31)
    throw Error("condition multiset of size " + std::to_string(delta.size()) + " exceeds subset bound " +
                std::to_string(subset_bound));
  const std::size_t j = delta.size();
  std::vector<std::uint32_t> truth;
  truth.reserve(universe.size());
  for (const Model& m : universe) {
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < j; ++i)
      if (eval(delta[i], m)) bits |= std::uint32_t{1} << i;
    truth.push_back(bits);
  }
  for (std::size_t k = j + 1; k-- > 0;) {
    std::vector<std::vector<std::size_t>> found;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << j); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
      bool has_model = false;
      for (std::uint32_t t : truth)
        if ((t & mask) == mask) {
          has_model = true;
          break;
        }
      if (!has_model) continue;
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < j; ++i)
        if (mask & (std::uint32_t{1} << i)) subset.push_back(i);
      found.push_back(std::move(subset));
    }
    if (!found.empty()) return found;
  }
  return {};  // empty universe
}

inline std::vector<std::vector<Formula>> max_consistent_subsets(std::span<const Formula> delta,
                                                                const VocabularyPtr& vocab,
                                                                std::size_t subset_bound = kDefaultSubsetBound) {
  const auto universe = enumerate_models(vocab);
  std::vector<std::vector<Formula>> out;
  for (const auto& idx : max_consistent_subset_indices(delta, universe, subset_bound)) {
    std::vector<Formula> subset;
    for (std::size_t i : idx) subset.push_back(delta[i]);
    out.push_back(std::move(subset));
  }
  return out;
}

inline ModelSet support_of(const WorldTable& table) {
  ModelSet out(table.vocabulary());
  for (std::size_t n = 0; n < table.size(); ++n)
    if (table.supported(n)) out.insert(table.rows()[n].model);
  return out;
}

// Approximate models of delta within the support. Consistency is judged
// against the support, so a condition set with no supported model falls back
// to its largest subsets that do have one. Computed twice (union of the
// models of the maximal subsets, and argmax of the satisfied count) and the
// two must agree.
inline ModelSet approximate_models(std::span<const Formula> delta, const ModelSet& support) {
  const std::vector<Model> universe(support.begin(), support.end());

  ModelSet by_subsets(support.vocabulary());
  for (const auto& idx : max_consistent_subset_indices(delta, universe)) {
    std::vector<Formula> subset;
    for (std::size_t i : idx) subset.push_back(delta[i]);
    for (const Model& m : universe)
      if (satisfies_all(subset, m)) by_subsets.insert(m);
  }

  ModelSet by_count(support.vocabulary());
  std::size_t best = 0;
  std::vector<std::size_t> count(universe.size(), 0);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    for (const Formula& f : delta) count[i] += eval(f, universe[i]);
    best = std::max(best, count[i]);
  }
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (count[i] == best) by_count.insert(universe[i]);

  if (!(by_subsets == by_count))
    throw std::logic_error("approximate model characterizations disagree");
  return by_subsets;
}

// Ratio of full-joint sums over every model (and every datum for MLE
// tables), with the likelihood taken as an explicit per-formula product.
inline ProbResult brute_force_conditional(const Formula& alpha, std::span<const Formula> delta, const WorldTable& table,
                                          const Rational& mu) {
  if (mu <= 0 || mu > 1) throw Error("brute-force mu must lie in (0, 1]");
  const VocabularyPtr& vocab = table.vocabulary();
  const auto models = enumerate_models(vocab);
  auto bernoulli = [&](const Formula& f, const Model& m) -> Rational { return eval(f, m) ? mu : Rational(1 - mu); };

  std::vector<Model> data;
  if (table.mode() == PriorMode::Mle)
    for (const auto& row : table.rows())
      for (std::uint64_t c = 0; c < row.count; ++c) data.push_back(row.model);
  const Rational p_datum = data.empty() ? Rational(0) : Rational(Integer(1), Integer(data.size()));

  Rational num = 0, den = 0;
  for (const Model& m : models) {
    Rational p_delta = 1;
    for (const Formula& f : delta) p_delta *= bernoulli(f, m);
    const Rational p_alpha = bernoulli(alpha, m);
    if (table.mode() == PriorMode::Mle) {
      for (const Model& d : data) {
        const Rational p_m_given_d = (m == d) ? 1 : 0;
        num += p_alpha * p_delta * p_m_given_d * p_datum;
        den += p_delta * p_m_given_d * p_datum;
      }
    } else {
      const Rational p_m = table.prior_of(m);
      num += p_alpha * p_delta * p_m;
      den += p_delta * p_m;
    }
  }
  if (den == 0) return ProbResult::undefined("zero denominator in the full joint");
  return ProbResult::of(num / den);
}

// ---------------------------------------------------------------------------
// Theorem harness

using ConditionalEngine =
    std::function<ProbResult(const Formula&, std::span<const Formula>, const WorldTable&, const Semantics&)>;

inline ConditionalEngine default_engine() {
  return [](const Formula& a, std::span<const Formula> d, const WorldTable& t, const Semantics& s) {
    return conditional(a, d, t, s);
  };
}

enum class Verdict { Pass, Fail, Skipped };

struct TheoremOutcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

inline constexpr std::array<const char*, 5> kTheoremNames = {"T1", "T2", "T3", "T4", "T5"};

struct InstanceCheck {
  std::array<TheoremOutcome, 5> theorems;  // T1..T5
};

inline nlohmann::json instance_json(const Formula& alpha, std::span<const Formula> delta, const Formula& beta,
                                    const WorldTable& table) {
  nlohmann::json prior = nlohmann::json::array();
  for (std::size_t n = 0; n < table.size(); ++n)
    if (table.supported(n))
      prior.push_back({{"model", table.rows()[n].model.to_string()}, {"w", format_rational(table.prior(n))}});
  nlohmann::json d = nlohmann::json::array();
  for (const Formula& f : delta) d.push_back(f.to_string());
  return {{"vocabulary", table.vocabulary()->to_json()},
          {"prior", prior},
          {"alpha", alpha.to_string()},
          {"delta", d},
          {"beta", beta.to_string()}};
}

// Checks one instance. T1/T3 (strict/limit p = 1 iff entailment) need a
// consistent delta; T1, T3 and T5 need every model to have positive prior.
inline InstanceCheck check_instance(const Formula& alpha, std::span<const Formula> delta, const Formula& beta,
                                    const WorldTable& table, const ConditionalEngine& engine = default_engine()) {
  const VocabularyPtr& vocab = table.vocabulary();
  const ModelSet support = support_of(table);
  const bool all_positive = support.size() == (std::size_t{1} << vocab->atom_count());
  const ModelSet delta_models = models_of(delta, vocab);
  const bool is_consistent = !delta_models.empty();
  const bool is_entailed = entails(delta, alpha, vocab);

  const ProbResult strict = engine(alpha, delta, table, Semantics::strict());
  const ProbResult limit = engine(alpha, delta, table, Semantics::limit());
  auto is_one = [](const ProbResult& p) { return p.defined() && p.value() == 1; };
  auto describe = [](const ProbResult& p) { return p.to_string(); };

  InstanceCheck out;
  auto iff_check = [&](TheoremOutcome& o, const ProbResult& p, const char* regime) {
    if (!all_positive) {
      o = {Verdict::Skipped, "prior has a zero entry"};
    } else if (!is_consistent) {
      o = {Verdict::Skipped, "conditions are inconsistent"};
    } else if (p.defined() && is_one(p) == is_entailed) {
      o = {Verdict::Pass, {}};
    } else {
      o = {Verdict::Fail, std::string(regime) + " p = " + describe(p) + " but entails = " + (is_entailed ? "true" : "false")};
    }
  };
  iff_check(out.theorems[0], strict, "strict");
  iff_check(out.theorems[2], limit, "limit");

  {
    const bool expect_undefined = delta_models.intersect(support).empty();
    if (strict.defined() == !expect_undefined && (is_consistent || is_entailed))
      out.theorems[1] = {Verdict::Pass, {}};
    else
      out.theorems[1] = {Verdict::Fail, "strict p = " + describe(strict) + ", supported models of conditions: " +
                                            std::to_string(delta_models.intersect(support).size())};
  }

  {
    const std::vector<Formula> contradiction = {Formula::conjunction(beta, Formula::negation(beta))};
    const ProbResult got = engine(alpha, contradiction, table, Semantics::limit());
    const ProbResult want = brute_force_conditional(alpha, {}, table, 1);
    if (got == want)
      out.theorems[3] = {Verdict::Pass, {}};
    else
      out.theorems[3] = {Verdict::Fail, "limit p(alpha | beta & !beta) = " + describe(got) + ", p(alpha) = " + describe(want)};
  }

  if (!all_positive) {
    out.theorems[4] = {Verdict::Skipped, "prior has a zero entry"};
  } else {
    bool all_entail = true;
    for (const auto& subset : max_consistent_subsets(delta, vocab)) all_entail = all_entail && entails(subset, alpha, vocab);
    std::string cross;
    try {
      const ModelSet approx = approximate_models(delta, support);
      const Formula a[] = {alpha};
      if (approx.subset_of(models_of(a, vocab)) != all_entail) cross = "approximate models disagree with subsets";
    } catch (const std::logic_error& e) {
      cross = e.what();
    }
    if (cross.empty() && limit.defined() && is_one(limit) == all_entail)
      out.theorems[4] = {Verdict::Pass, {}};
    else
      out.theorems[4] = {Verdict::Fail, cross.empty() ? "limit p = " + describe(limit) + " but all maximal subsets entail = " +
                                                            (all_entail ? "true" : "false")
                                                      : cross};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct GeneratorOptions {
  std::size_t max_atoms = 4;
  std::size_t max_depth = 4;
  std::size_t max_delta = 4;
  bool all_positive = true;  // otherwise the table is random data with gaps
};

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed, GeneratorOptions options = {}) : rng_(seed), options_(options) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return below(2) == 0; }
  const GeneratorOptions& options() const { return options_; }

  VocabularyPtr vocabulary() {
    static const char* names[] = {"p", "q", "r", "s", "t", "u", "v", "w"};
    const std::size_t max_atoms = std::max<std::size_t>(1, options_.max_atoms);
    auto props = [&](std::size_t n) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < n; ++i) out.emplace_back(names[i % 8] + (i >= 8 ? std::to_string(i) : ""));
      return out;
    };
    const std::size_t shape = below(3);
    if (shape == 2 && max_atoms >= 4) return Vocabulary::make({}, {{"blames", 2}}, {"a", "b"});
    if (shape >= 1 && max_atoms >= 2)
      return Vocabulary::make(props(below(max_atoms - 1)), {{"f", 1}}, {"a", "b"});
    return Vocabulary::make(props(1 + below(max_atoms)));
  }

  Formula formula(const VocabularyPtr& vocab) { return formula(vocab, options_.max_depth); }

  Formula formula(const VocabularyPtr& vocab, std::size_t depth) {
    std::vector<std::string> scope;
    return formula(vocab, depth, scope);
  }

  std::vector<Formula> multiset(const VocabularyPtr& vocab) {
    std::vector<Formula> out;
    const std::size_t n = below(options_.max_delta + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(formula(vocab));
    return out;
  }

  WorldTable table(const VocabularyPtr& vocab) {
    const auto models = enumerate_models(vocab);
    if (options_.all_positive) {
      if (coin()) {
        std::vector<Integer> raw;
        Integer total = 0;
        for (std::size_t i = 0; i < models.size(); ++i) {
          raw.push_back(1 + below(9));
          total += raw.back();
        }
        std::vector<std::pair<Model, Rational>> w;
        for (std::size_t i = 0; i < models.size(); ++i) w.emplace_back(models[i], Rational(raw[i], total));
        return build_prior(PriorSpec::explicit_weights(std::move(w)), vocab);
      }
      std::vector<Model> data;
      for (const Model& m : models)
        for (std::size_t c = 0, n = 1 + below(3); c < n; ++c) data.push_back(m);
      return WorldTable::from_data(vocab, data);
    }
    std::vector<Model> data;
    for (std::size_t c = 0, n = 1 + below(11); c < n; ++c) data.push_back(models[below(models.size())]);
    return WorldTable::from_data(vocab, data);
  }

  Rational mu() {
    const std::size_t den = 2 + below(19);
    return Rational(Integer(1 + below(den - 1)), Integer(den));
  }

 private:
  Formula atom(const VocabularyPtr& vocab, const std::vector<std::string>& scope) {
    const auto& props = vocab->propositions();
    const auto& preds = vocab->predicates();
    const std::size_t pick = below(props.size() + preds.size());
    if (pick < props.size()) return Formula::atom(vocab, props[pick]);
    const Predicate& p = preds[pick - props.size()];
    std::vector<Term> args;
    for (std::size_t i = 0; i < p.arity; ++i) {
      if (!scope.empty() && coin())
        args.push_back(Term::variable(scope[below(scope.size())]));
      else
        args.push_back(Term::constant(vocab->constants()[below(vocab->constants().size())]));
    }
    return Formula::atom(vocab, p.name, std::move(args));
  }

  Formula formula(const VocabularyPtr& vocab, std::size_t depth, std::vector<std::string>& scope) {
    if (depth == 0 || below(3) == 0) return atom(vocab, scope);
    const bool quantifiers = !vocab->predicates().empty();
    const std::size_t op = below(quantifiers ? 7 : 5);
    switch (op) {
      case 0: return Formula::negation(formula(vocab, depth - 1, scope));
      case 1:
      case 2:
      case 3:
      case 4: {
        static constexpr FormulaKind kinds[] = {FormulaKind::And, FormulaKind::Or, FormulaKind::Implies, FormulaKind::Iff};
        Formula a = formula(vocab, depth - 1, scope);
        Formula b = formula(vocab, depth - 1, scope);
        return Formula::binary(kinds[op - 1], a, b);
      }
      default: {
        static const char* vars[] = {"x", "y", "z", "w", "x4", "x5"};
        std::string var = vars[std::min<std::size_t>(scope.size(), 5)];
        scope.push_back(var);
        Formula body = formula(vocab, depth - 1, scope);
        scope.pop_back();
        return op == 5 ? Formula::forall(var, body) : Formula::exists(var, body);
      }
    }
  }

  std::mt19937_64 rng_;
  GeneratorOptions options_;
};

// ---------------------------------------------------------------------------
// Report

struct TheoremTally {
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  std::vector<nlohmann::json> counterexamples;  // first few only
};

struct TheoremReport {
  static constexpr std::size_t kMaxCounterexamples = 5;

  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::array<TheoremTally, 5> theorems;

  bool all_passed() const {
    for (const auto& t : theorems)
      if (t.failures != 0) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json th = nlohmann::json::object();
    for (std::size_t i = 0; i < theorems.size(); ++i) {
      const auto& t = theorems[i];
      th[kTheoremNames[i]] = {{"trials", t.trials},       {"passes", t.passes},
                              {"skipped", t.skipped},     {"failures", t.failures},
                              {"counterexamples", t.counterexamples}};
    }
    return {{"seed", seed},
            {"trials", trials},
            {"all_passed", all_passed()},
            {"theorems", th},
            {"notes",
             {"T1 and T3 are checked on consistent conditions with an all-positive prior; other instances count as skipped",
              "T5 is checked only under all-positive priors"}}};
  }
};

// Trial i draws from its own generator seeded by splitmix64(seed + i), so a
// trial can be replayed in isolation.
inline TheoremReport check_theorems(std::size_t trials, std::uint64_t seed,
                                    const ConditionalEngine& engine = default_engine()) {
  if (trials == 0) throw Error("check needs at least one trial");
  TheoremReport report;
  report.seed = seed;
  report.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    InstanceGenerator gen(splitmix64(seed + i));
    const VocabularyPtr vocab = gen.vocabulary();
    const WorldTable table = gen.table(vocab);
    const Formula alpha = gen.formula(vocab);
    const Formula beta = gen.formula(vocab);
    const std::vector<Formula> delta = gen.multiset(vocab);
    const InstanceCheck check = check_instance(alpha, delta, beta, table, engine);
    for (std::size_t t = 0; t < 5; ++t) {
      auto& tally = report.theorems[t];
      ++tally.trials;
      switch (check.theorems[t].verdict) {
        case Verdict::Pass: ++tally.passes; break;
        case Verdict::Skipped: ++tally.skipped; break;
        case Verdict::Fail:
          ++tally.failures;
          if (tally.counterexamples.size() < TheoremReport::kMaxCounterexamples) {
            nlohmann::json ce = instance_json(alpha, delta, beta, table);
            ce["trial"] = i;
            ce["detail"] = check.theorems[t].detail;
            tally.counterexamples.push_back(std::move(ce));
          }
          break;
      }
    }
  }
  return report;
}

}  // namespace genlogic::oracle

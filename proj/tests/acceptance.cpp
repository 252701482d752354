// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "genlogic/genlogic.hpp"
#include "support/mutant_engine.hpp"
#include "support/worked_tables.hpp"

namespace {

using namespace genlogic;
using oracle::GeneratorOptions;
using oracle::InstanceGenerator;

Rational r(long long num, long long den = 1) { return Rational(num, den); }

std::vector<Formula> fs(std::initializer_list<const char*> texts, const VocabularyPtr& v) {
  std::vector<Formula> out;
  for (const char* t : texts) out.push_back(parse(t, v));
  return out;
}

// Each check returns an empty string on success, otherwise what went wrong.
using Check = std::function<std::string()>;

std::string expect_eq(const ProbResult& got, const Rational& want, const char* what) {
  if (got.defined() && got.value() == want) return {};
  return std::string(what) + ": got " + got.to_string() + ", want " + format_rational(want);
}

std::string criterion_rain_given_wet() {
  const auto v = testing::rain_wet();
  return expect_eq(conditional(parse("rain", v), fs({"wet"}, v), testing::rain_wet_table(v), Semantics::strict()),
                   r(3, 5), "p(rain|wet)");
}

std::string criterion_blames() {
  const auto v = testing::blames();
  const auto table = testing::blames_table(v);
  // k1: someone but not everyone blames a. k2: everyone does.
  std::uint64_t k1 = 0, k2 = 0;
  const Formula all = parse("forall x. blames(x,a)", v), some = parse("exists x. blames(x,a)", v);
  for (const auto& row : table.rows()) {
    if (eval(all, row.model)) k2 += row.count;
    else if (eval(some, row.model)) k1 += row.count;
  }
  if (k1 != 2 || k2 != 3) return "unexpected data counts";
  return expect_eq(conditional(all, {some}, table, Semantics::strict()), Rational(Integer(k2), Integer(k1 + k2)),
                   "p(forall|exists)");
}

std::string criterion_bird_update() {
  const auto v = testing::bird_fly();
  const auto table = testing::bird_fly_table(v);
  const Formula alpha = parse("bird -> fly", v);
  const auto p10 = marginal(alpha, table);
  if (auto e = expect_eq(p10, r(1), "p10(bird -> fly)"); !e.empty()) return e;
  const Model datum = parse_assignment("bird=1,fly=0", v);
  const Rational p11 = update_marginal(p10.value(), table.total(), alpha, datum);
  if (p11 != r(10, 11)) return "p11 = " + format_rational(p11);
  return expect_eq(marginal(alpha, table.add_datum(datum)), p11, "batch recompute");
}

std::string criterion_inconsistent_limit() {
  const auto v = testing::rain_wet();
  const auto uniform = build_prior(PriorSpec::uniform(), v);
  const auto delta = fs({"rain", "wet", "rain -> wet", "!wet"}, v);
  if (auto e = expect_eq(conditional(parse("rain", v), delta, uniform, Semantics::limit()), r(1), "limit p(rain|D)");
      !e.empty())
    return e;
  const auto subsets = oracle::max_consistent_subsets(delta, v);
  if (subsets.size() != 1 || subsets.front().size() != 3) return "expected a single maximal subset of size 3";
  for (std::size_t i = 0; i < 3; ++i)
    if (!(subsets.front()[i] == delta[i])) return "maximal subset is not {rain, wet, rain -> wet}";
  if (!oracle::entails(subsets.front(), parse("rain", v), v)) return "maximal subset does not entail rain";
  if (oracle::entails(fs({"rain -> wet", "!wet"}, v), parse("rain", v), v)) return "{rain -> wet, !wet} entails rain";
  return {};
}

std::string criterion_counterfactual() {
  const auto v = testing::football();
  const auto table = testing::football_table(v);
  const auto delta = fs({"goal", "home", "!opponent"}, v);
  if (auto e = expect_eq(conditional(parse("win", v), delta, table, Semantics::limit()), r(2, 3), "p(win|...)");
      !e.empty())
    return e;
  const auto approx = oracle::approximate_models(delta, oracle::support_of(table));
  if (approx.to_strings() != std::vector<std::string>{"0100", "1001", "1111"}) return "approximate models differ";
  return {};
}

std::string criterion_zero_prior_entry() {
  const auto v = testing::rain_wet();
  const auto m = [&](const char* s) { return Model::from_string(v, s); };
  const auto table = build_prior(
      PriorSpec::explicit_weights({{m("00"), r(3, 5)}, {m("01"), r(0)}, {m("10"), r(1, 10)}, {m("11"), r(3, 10)}}), v);
  if (auto e = expect_eq(conditional(parse("rain", v), fs({"wet"}, v), table, Semantics::strict()), r(1), "p(rain|wet)");
      !e.empty())
    return e;
  if (oracle::entails(fs({"wet"}, v), parse("rain", v), v)) return "{wet} entails rain";
  return {};
}

std::string criterion_harness() {
  const auto good = oracle::check_theorems(1000, 7);
  if (!good.all_passed()) return "correct engine fails: " + good.to_json().dump();
  for (const auto& t : good.theorems)
    if (!t.counterexamples.empty()) return "correct engine produced counterexamples";
  const auto bad = oracle::check_theorems(1000, 7, testing::mutant_engine());
  if (bad.theorems[4].failures == 0) return "mutant engine not caught by T5";
  return {};
}

std::string criterion_oracle_equivalence() {
  for (std::uint64_t i = 0; i < 200; ++i) {
    InstanceGenerator gen(oracle::splitmix64(31 + i),
                          GeneratorOptions{.max_atoms = 3, .max_depth = 3, .max_delta = 3, .all_positive = i % 2 == 0});
    const auto vocab = gen.vocabulary();
    const auto table = gen.table(vocab);
    const Formula alpha = gen.formula(vocab);
    const auto delta = gen.multiset(vocab);
    const Rational mu = gen.mu();
    if (!(conditional(alpha, delta, table, Semantics::fixed(mu)) == oracle::brute_force_conditional(alpha, delta, table, mu)))
      return "instance " + std::to_string(i) + " differs";
  }
  return {};
}

std::string criterion_properties() {
  const Rational near_one = 1 - Rational(1, 1000000);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const std::string at = " at instance " + std::to_string(i);
    InstanceGenerator gen(oracle::splitmix64(77 + i), GeneratorOptions{.all_positive = i % 2 == 0});
    const auto vocab = gen.vocabulary();
    const auto table = gen.table(vocab);
    const Formula a = gen.formula(vocab), b = gen.formula(vocab);
    const auto delta = gen.multiset(vocab);
    const std::vector<Semantics> sems = {Semantics::strict(), Semantics::limit(), Semantics::fixed(gen.mu())};

    for (const auto& sem : sems) {
      const auto p = conditional(a, delta, table, sem), q = conditional(Formula::negation(a), delta, table, sem);
      if (p.defined() != q.defined() || (p.defined() && q.value() != 1 - p.value())) return "complement" + at;
      const auto p_or = conditional(Formula::disjunction(a, b), delta, table, sem);
      if (p_or.defined() && p_or.value() + conditional(Formula::conjunction(a, b), delta, table, sem).value() !=
                                p.value() + conditional(b, delta, table, sem).value())
        return "modularity" + at;
    }

    if (table.mode() == PriorMode::Mle && marginal_by_data(a, table) != marginal(a, table).value())
      return "data sum vs model sum" + at;

    const auto models = enumerate_models(vocab);
    std::vector<Model> data = {models[gen.below(models.size())]};
    WorldTable current = WorldTable::from_data(vocab, data);
    Rational p_k = marginal(a, current).value();
    for (int step = 0; step < 100; ++step) {
      const Model& next = models[gen.below(models.size())];
      p_k = update_marginal(p_k, current.total(), a, next);
      current = std::move(current).add_datum(next);
      if (p_k != marginal(a, current).value()) return "incremental update" + at;
    }

    const auto strict = conditional(a, delta, table, Semantics::strict());
    const auto limit = conditional(a, delta, table, Semantics::limit());
    if (strict.defined() && !(strict == limit)) return "limit vs strict on consistent conditions" + at;

    const Rational gap = conditional(a, delta, table, Semantics::fixed(near_one)).value() - limit.value();
    if (abs(gap) >= Rational(1, 1000)) return "fixed near one vs limit" + at;
  }
  return {};
}

std::string criterion_contradiction() {
  for (std::uint64_t i = 0; i < 50; ++i) {
    InstanceGenerator gen(oracle::splitmix64(505 + i), GeneratorOptions{.all_positive = i % 2 == 0});
    const auto vocab = gen.vocabulary();
    const auto table = gen.table(vocab);
    const Formula alpha = gen.formula(vocab), beta = gen.formula(vocab);
    const Formula contra[] = {Formula::conjunction(beta, Formula::negation(beta))};
    if (!(conditional(alpha, contra, table, Semantics::limit()) == marginal(alpha, table)))
      return "instance " + std::to_string(i) + " differs";
  }
  return {};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Check>> criteria = {
      {"rain given wet, strict, data prior = 3/5", criterion_rain_given_wet},
      {"forall given exists over blames table = 3/5", criterion_blames},
      {"bird -> fly = 1, then 10/11 after one more datum, equal to batch", criterion_bird_update},
      {"inconsistent conditions under limit, single maximal subset", criterion_inconsistent_limit},
      {"counterfactual win = 2/3 and approximate models {0100, 1001, 1111}", criterion_counterfactual},
      {"zero prior entry: strict p = 1 without entailment", criterion_zero_prior_entry},
      {"theorem harness seed 7 passes, mutant caught by T5", criterion_harness},
      {"fixed mu equals brute-force joint on 200 instances", criterion_oracle_equivalence},
      {"property suites over 200 instances", criterion_properties},
      {"contradictory condition is neutral under limit, 50 instances", criterion_contradiction},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      error = criteria[i].second();
    } catch (const std::exception& e) {
      error = std::string("exception: ") + e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (error.empty()) {
      std::printf("PASS %2zu  %s  (%.0f ms)\n", i + 1, criteria[i].first, ms);
    } else {
      ++failed;
      std::printf("FAIL %2zu  %s  (%.0f ms): %s\n", i + 1, criteria[i].first, ms, error.c_str());
    }
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

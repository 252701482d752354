#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "genlogic/worldstore.hpp"
#include "support/worked_tables.hpp"

namespace genlogic {
namespace {

WorldTable ingest(const std::string& csv, const VocabularyPtr& v) {
  std::istringstream in(csv);
  return ingest_csv(in, v);
}

std::uint64_t count_of(const WorldTable& t, const std::string& bits) {
  const auto n = t.find(Model::from_string(t.vocabulary(), bits));
  return n ? t.rows()[*n].count : 0;
}

Rational r(long long num, long long den = 1) { return Rational(num, den); }

TEST(IngestCsv, RainWetTable) {
  const auto v = testing::rain_wet();
  const auto t = ingest("rain,wet\n0,0\n0,0\n0,0\n0,0\n0,1\n0,1\n1,0\n1,1\n1,1\n1,1\n", v);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.total(), 10u);
  EXPECT_EQ(count_of(t, "00"), 4u);
  EXPECT_EQ(count_of(t, "01"), 2u);
  EXPECT_EQ(count_of(t, "10"), 1u);
  EXPECT_EQ(count_of(t, "11"), 3u);
  EXPECT_EQ(t.mode(), PriorMode::Mle);
  EXPECT_EQ(t, testing::rain_wet_table(v));
}

TEST(IngestCsv, BirdFlyTableHasThreeModels) {
  const auto v = testing::bird_fly();
  const auto t = ingest("bird,fly\n0,0\n0,0\n0,0\n0,0\n0,0\n0,1\n0,1\n1,1\n1,1\n1,1\n", v);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.support_size(), 3u);
  EXPECT_EQ(t.total(), 10u);
  EXPECT_EQ(t.prior_of(Model::from_string(v, "10")), 0);
}

TEST(IngestCsv, ColumnsInAnyOrderAndCrlf) {
  const auto v = testing::rain_wet();
  const auto t = ingest("wet, rain\r\n1,0\r\n0,1\r\n\r\n", v);
  EXPECT_EQ(count_of(t, "01"), 1u);
  EXPECT_EQ(count_of(t, "10"), 1u);
}

TEST(IngestCsv, PredicateColumns) {
  const auto v = testing::blames();
  const auto t = ingest("blames(b,b),blames(a,a),blames(a,b),blames(b,a)\n1,1,0,0\n", v);
  EXPECT_EQ(count_of(t, "1001"), 1u);
}

TEST(IngestCsv, Errors) {
  const auto v = testing::rain_wet();
  EXPECT_THROW(ingest("rain,wet\n", v), DataError);
  EXPECT_THROW(ingest("", v), DataError);
  EXPECT_THROW(ingest("rain,snow\n0,0\n", v), DataError);
  EXPECT_THROW(ingest("rain\n0\n", v), DataError);
  EXPECT_THROW(ingest("rain,wet,rain\n0,0,0\n", v), DataError);
  EXPECT_THROW(ingest("rain,wet\n0,2\n", v), DataError);
  EXPECT_THROW(ingest("rain,wet\n0\n", v), DataError);
  EXPECT_THROW(ingest("rain,wet\n0,1,1\n", v), DataError);
  EXPECT_THROW(ingest("rain,wet\n0,\n", v), DataError);
}

TEST(IngestCsv, RowOrderDoesNotMatter) {
  const auto v = Vocabulary::make({"p", "q", "r"});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> rows;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 12); i < n; ++i) {
      const auto x = rng() % 8;
      rows.push_back(std::to_string(x >> 2 & 1) + "," + std::to_string(x >> 1 & 1) + "," + std::to_string(x & 1));
    }
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::string a = "p,q,r\n", b = "p,q,r\n";
    for (const auto& row : rows) a += row + "\n";
    for (const auto& row : shuffled) b += row + "\n";
    EXPECT_EQ(ingest(a, v), ingest(b, v));
  }
}

TEST(MlePrior, CountsOverTotal) {
  const auto v = testing::rain_wet();
  const auto t = testing::rain_wet_table(v);
  EXPECT_EQ(mle_prior(t), (std::vector<Rational>{r(2, 5), r(1, 5), r(1, 10), r(3, 10)}));

  const auto b = testing::blames();
  EXPECT_EQ(mle_prior(testing::blames_table(b)), (std::vector<Rational>{r(1, 5), r(3, 10), r(1, 2)}));

  const auto single = testing::table_from_counts(v, {{"11", 7}});
  EXPECT_EQ(mle_prior(single), (std::vector<Rational>{r(1)}));
}

TEST(MlePrior, RequiresData) {
  const auto v = testing::rain_wet();
  EXPECT_THROW(mle_prior(WorldTable::from_data(v, {})), DataError);
}

TEST(AddDatum, NewModelAppended) {
  const auto v = testing::bird_fly();
  const auto before = testing::bird_fly_table(v);
  const auto after = before.add_datum(Model::from_string(v, "10"));
  EXPECT_EQ(after.total(), 11u);
  EXPECT_EQ(count_of(after, "00"), 5u);
  EXPECT_EQ(count_of(after, "01"), 2u);
  EXPECT_EQ(count_of(after, "10"), 1u);
  EXPECT_EQ(count_of(after, "11"), 3u);
  EXPECT_EQ(after.prior_of(Model::from_string(v, "10")), r(1, 11));
  // The original snapshot is untouched.
  EXPECT_EQ(before.total(), 10u);
  EXPECT_EQ(count_of(before, "10"), 0u);
}

TEST(AddDatum, SameRowTwice) {
  const auto v = testing::rain_wet();
  const auto t = testing::rain_wet_table(v);
  const Model m = Model::from_string(v, "01");
  const auto u = t.add_datum(m).add_datum(m);
  EXPECT_EQ(count_of(u, "01"), 4u);
  EXPECT_EQ(count_of(u, "00"), 4u);
  EXPECT_EQ(count_of(u, "10"), 1u);
  EXPECT_EQ(count_of(u, "11"), 3u);
  EXPECT_EQ(u.total(), 12u);
}

TEST(AddDatum, FixedPriorsRejectData) {
  const auto v = testing::rain_wet();
  const auto m = [&](const char* s) { return Model::from_string(v, s); };
  const auto fixed = build_prior(
      PriorSpec::explicit_weights({{m("00"), r(3, 5)}, {m("01"), r(0)}, {m("10"), r(1, 10)}, {m("11"), r(3, 10)}}), v);
  EXPECT_THROW(fixed.add_datum(m("11")), DataError);
  EXPECT_THROW(build_prior(PriorSpec::uniform(), v).add_datum(m("11")), DataError);
}

TEST(AddDatum, VocabularyMismatch) {
  const auto t = testing::rain_wet_table(testing::rain_wet());
  EXPECT_THROW(t.add_datum(Model::from_string(testing::bird_fly(), "10")), VocabularyError);
}

TEST(AddDatum, IncrementalEqualsBatch) {
  const auto v = Vocabulary::make({"p", "q", "r"});
  const auto models = enumerate_models(v);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Model> data;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 20); i < n; ++i) data.push_back(models[rng() % models.size()]);
    WorldTable incremental = WorldTable::from_data(v, std::span(data).first(1));
    for (std::size_t i = 1; i < data.size(); ++i) incremental = std::move(incremental).add_datum(data[i]);
    const WorldTable batch = WorldTable::from_data(v, data);
    EXPECT_EQ(incremental, batch);
    EXPECT_EQ(mle_prior(incremental).size(), batch.size());
    Rational sum = 0;
    std::uint64_t k = 0;
    for (std::size_t n = 0; n < incremental.size(); ++n) {
      sum += incremental.prior(n);
      k += incremental.rows()[n].count;
      EXPECT_EQ(incremental.prior(n), batch.prior_of(incremental.rows()[n].model));
    }
    EXPECT_EQ(sum, 1);
    EXPECT_EQ(k, incremental.total());
  }
}

TEST(EnumerateModels, Counts) {
  EXPECT_EQ(enumerate_models(testing::blames()).size(), 16u);
  EXPECT_EQ(enumerate_models(Vocabulary::make({"p"})).size(), 2u);
  const auto v = testing::rain_wet();
  const auto models = enumerate_models(v);
  std::vector<std::string> bits;
  for (const auto& m : models) bits.push_back(m.to_string());
  EXPECT_EQ(bits, (std::vector<std::string>{"00", "01", "10", "11"}));
}

TEST(EnumerateModels, Bound) {
  std::vector<std::string> names;
  for (int i = 0; i < 21; ++i) names.push_back("p" + std::to_string(i));
  const auto v = Vocabulary::make(names);
  EXPECT_THROW(enumerate_models(v), DataError);
  names.pop_back();
  names.pop_back();
  names.pop_back();
  names.pop_back();
  names.pop_back();
  names.pop_back();
  EXPECT_EQ(enumerate_models(Vocabulary::make(names), 15).size(), std::size_t{1} << 15);
}

TEST(BuildPrior, Uniform) {
  const auto v = testing::rain_wet();
  const auto t = build_prior(PriorSpec::uniform(), v);
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(t.prior(n), r(1, 4));
  EXPECT_EQ(t.total(), 0u);
  EXPECT_EQ(t.support_size(), 4u);
}

TEST(BuildPrior, ExplicitWithZeroEntry) {
  const auto v = testing::rain_wet();
  const auto m = [&](const char* s) { return Model::from_string(v, s); };
  const auto t = build_prior(
      PriorSpec::explicit_weights({{m("00"), r(3, 5)}, {m("01"), r(0)}, {m("10"), r(1, 10)}, {m("11"), r(3, 10)}}), v);
  EXPECT_EQ(t.support_size(), 3u);
  EXPECT_EQ(t.prior_of(m("01")), 0);
  EXPECT_EQ(t.prior_of(m("00")), r(3, 5));
}

TEST(BuildPrior, Errors) {
  const auto v = testing::rain_wet();
  const auto m = [&](const char* s) { return Model::from_string(v, s); };
  EXPECT_THROW(build_prior(PriorSpec::explicit_weights({{m("00"), r(9, 10)}}), v), DataError);
  EXPECT_THROW(build_prior(PriorSpec::explicit_weights({{m("00"), r(3, 2)}, {m("01"), r(-1, 2)}}), v), DataError);
  EXPECT_THROW(build_prior(PriorSpec::explicit_weights({{m("00"), r(1, 2)}, {m("00"), r(1, 2)}}), v), DataError);
  EXPECT_THROW(build_prior(PriorSpec::mle(), v), DataError);
  std::vector<std::string> names;
  for (int i = 0; i < 21; ++i) names.push_back("p" + std::to_string(i));
  EXPECT_THROW(build_prior(PriorSpec::uniform(), Vocabulary::make(names)), DataError);
}

TEST(BuildPrior, MleReturnsData) {
  const auto v = testing::rain_wet();
  const auto data = testing::rain_wet_table(v);
  EXPECT_EQ(build_prior(PriorSpec::mle(), v, data), data);
}

TEST(PriorJson, ParsesWeightsExactly) {
  const auto v = testing::rain_wet();
  const auto spec = PriorSpec::from_json(nlohmann::json::parse(R"({"mode":"explicit","weights":[
      {"model":"00","w":"0.6"},{"model":"01","w":"0"},{"model":"10","w":"1/10"},{"model":"11","w":"3/10"}]})"),
                                         v);
  ASSERT_EQ(spec.weights.size(), 4u);
  EXPECT_EQ(spec.weights[0].second, r(3, 5));
  const auto t = build_prior(spec, v);
  EXPECT_EQ(t.support_size(), 3u);
  EXPECT_EQ(PriorSpec::from_json(spec.to_json(), v).weights, spec.weights);

  EXPECT_EQ(PriorSpec::from_json(nlohmann::json::parse(R"({"mode":"uniform"})"), v).mode, PriorMode::Uniform);
  EXPECT_THROW(PriorSpec::from_json(nlohmann::json::parse(R"({"mode":"bayes"})"), v), DataError);
  EXPECT_THROW(PriorSpec::from_json(nlohmann::json::parse(R"({"mode":"explicit"})"), v), DataError);
  EXPECT_THROW(PriorSpec::from_json(nlohmann::json::parse(R"({"mode":"explicit","weights":[{"model":"0","w":"1"}]})"), v),
               VocabularyError);
}

TEST(ParseAssignment, BitsOrNamedAtoms) {
  const auto v = testing::bird_fly();
  EXPECT_EQ(parse_assignment("bird=1,fly=0", v), Model::from_string(v, "10"));
  EXPECT_EQ(parse_assignment("fly = 1, bird = 0", v), Model::from_string(v, "01"));
  EXPECT_EQ(parse_assignment("11", v), Model::from_string(v, "11"));
  EXPECT_THROW(parse_assignment("bird=1", v), DataError);
  EXPECT_THROW(parse_assignment("bird=1,fly=2", v), DataError);
  EXPECT_THROW(parse_assignment("bird=1,fly=0,bird=1", v), DataError);
  const auto b = testing::blames();
  EXPECT_EQ(parse_assignment("blames(a,a)=1,blames(a,b)=0,blames(b,a)=0,blames(b,b)=1", b),
            Model::from_string(b, "1001"));
}

}  // namespace
}  // namespace genlogic

// genlogic: command-line front end for the probabilistic logic engine.
//
// Exit codes: 0 success, 1 input or usage error, 2 undefined probability,
// 3 theorem check failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "genlogic/genlogic.hpp"

#ifdef GENLOGIC_LIMIT_MUTANT
#include "support/mutant_engine.hpp"
#endif

namespace {

using genlogic::Formula;
using genlogic::VocabularyPtr;
using genlogic::WorldTable;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kUndefined = 2;
constexpr int kCheckFailed = 3;

struct Inputs {
  std::string data;
  std::string vocab;
  std::string prior;
  std::vector<std::string> given;
  std::string sem = "strict";
  std::string alpha;
  std::string row;
  bool write = false;
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  bool compact = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw genlogic::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw genlogic::Error("'" + path + "' is not valid JSON: " + e.what());
  }
}

VocabularyPtr load_vocabulary(const Inputs& in) {
  if (in.vocab.empty()) throw genlogic::Error("--vocab is required");
  return genlogic::Vocabulary::from_json(read_json(in.vocab));
}

std::optional<WorldTable> load_data(const Inputs& in, const VocabularyPtr& vocab) {
  if (in.data.empty()) return std::nullopt;
  std::ifstream f(in.data, std::ios::binary);
  if (!f) throw genlogic::Error("cannot open '" + in.data + "'");
  return genlogic::ingest_csv(f, vocab);
}

genlogic::PriorSpec load_prior_spec(const Inputs& in, const VocabularyPtr& vocab) {
  if (in.prior.empty() || in.prior == "mle") return genlogic::PriorSpec::mle();
  if (in.prior == "uniform") return genlogic::PriorSpec::uniform();
  return genlogic::PriorSpec::from_json(read_json(in.prior), vocab);
}

WorldTable load_table(const Inputs& in, const VocabularyPtr& vocab) {
  return genlogic::build_prior(load_prior_spec(in, vocab), vocab, load_data(in, vocab));
}

void emit(const json& j, const Inputs& in) { std::cout << (in.compact ? j.dump() : j.dump(2)) << "\n"; }

json probability_json(const genlogic::Rational& p) {
  return {{"p", genlogic::format_rational(p)}, {"decimal", genlogic::round_to_double(p)}};
}

int cmd_query(const Inputs& in) {
  const auto vocab = load_vocabulary(in);
  const auto sem = genlogic::Semantics::parse(in.sem);
  const auto table = load_table(in, vocab);
  const Formula alpha = genlogic::parse(in.alpha, vocab);
  const auto delta = genlogic::parse_all(in.given, vocab);
  const auto result = genlogic::conditional(alpha, delta, table, sem);
  json out = {{"semantics", sem.to_string()}, {"K", table.total()}, {"N_supported", table.support_size()}};
  if (!result.defined()) {
    out["p"] = "undefined";
    out["reason"] = result.reason();
    emit(out, in);
    return kUndefined;
  }
  out.update(probability_json(result.value()));
  emit(out, in);
  return kOk;
}

int cmd_marginal(const Inputs& in) {
  const auto vocab = load_vocabulary(in);
  const auto table = load_table(in, vocab);
  const Formula alpha = genlogic::parse(in.alpha, vocab);
  json out = probability_json(genlogic::marginal(alpha, table).value());
  out["K"] = table.total();
  out["N_supported"] = table.support_size();
  if (table.mode() == genlogic::PriorMode::Mle)
    out["p_by_data"] = genlogic::format_rational(genlogic::marginal_by_data(alpha, table));
  emit(out, in);
  return kOk;
}

void append_row(const std::string& path, const genlogic::Model& row, const VocabularyPtr& vocab) {
  std::istringstream content(read_file(path));
  std::string header;
  while (std::getline(content, header) && genlogic::detail::trim(header).empty()) {
  }
  std::string line;
  bool first = true;
  for (std::string_view name : genlogic::detail::split_fields(header)) {
    const auto idx = vocab->atom_index(genlogic::detail::strip_spaces(name));
    if (!idx) throw genlogic::Error("unknown column in '" + path + "'");
    line += first ? "" : ",";
    line += row[*idx] ? "1" : "0";
    first = false;
  }
  const std::string existing = read_file(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw genlogic::Error("cannot write '" + path + "'");
  if (!existing.empty() && existing.back() != '\n') out << "\n";
  out << line << "\n";
}

int cmd_update(const Inputs& in) {
  if (in.data.empty()) throw genlogic::Error("update needs --data");
  if (in.row.empty()) throw genlogic::Error("update needs --row");
  const auto vocab = load_vocabulary(in);
  if (load_prior_spec(in, vocab).mode != genlogic::PriorMode::Mle)
    throw genlogic::DataError("update needs the MLE prior; explicit and uniform priors are fixed");
  const auto table = load_table(in, vocab);
  const Formula alpha = genlogic::parse(in.alpha, vocab);
  const genlogic::Model row = genlogic::parse_assignment(in.row, vocab);

  const genlogic::Rational p_k = genlogic::marginal(alpha, table).value();
  const genlogic::Rational p_next = genlogic::update_marginal(p_k, table.total(), alpha, row);
  const WorldTable next = table.add_datum(row);
  const genlogic::Rational batch = genlogic::marginal(alpha, next).value();
  if (batch != p_next) throw std::logic_error("incremental and batch marginals disagree");

  if (in.write) append_row(in.data, row, vocab);
  emit({{"K", table.total()},
        {"K1", next.total()},
        {"p_K", genlogic::format_rational(p_k)},
        {"p_K1", genlogic::format_rational(p_next)},
        {"decimal_K", genlogic::round_to_double(p_k)},
        {"decimal_K1", genlogic::round_to_double(p_next)},
        {"written", in.write}},
       in);
  return kOk;
}

int cmd_entail(const Inputs& in) {
  const auto vocab = load_vocabulary(in);
  const Formula alpha = genlogic::parse(in.alpha, vocab);
  const auto delta = genlogic::parse_all(in.given, vocab);
  const auto models = genlogic::oracle::models_of(delta, vocab);
  emit({{"entails", genlogic::oracle::entails(delta, alpha, vocab)},
        {"consistent", !models.empty()},
        {"models", models.to_strings()}},
       in);
  return kOk;
}

int cmd_mcs(const Inputs& in) {
  const auto vocab = load_vocabulary(in);
  const auto delta = genlogic::parse_all(in.given, vocab);
  const auto subsets = genlogic::oracle::max_consistent_subsets(delta, vocab);
  json list = json::array();
  for (const auto& s : subsets) {
    json one = json::array();
    for (const Formula& f : s) one.push_back(f.to_string());
    list.push_back(one);
  }
  json out = {{"subsets", list},
              {"cardinality", subsets.empty() ? 0 : subsets.front().size()},
              {"consistent", genlogic::oracle::consistent(delta, vocab)}};
  if (!in.data.empty() || !in.prior.empty()) {
    const auto table = load_table(in, vocab);
    out["approximate_models"] =
        genlogic::oracle::approximate_models(delta, genlogic::oracle::support_of(table)).to_strings();
  }
  emit(out, in);
  return kOk;
}

int cmd_check(const Inputs& in) {
  if (in.trials == 0) throw genlogic::Error("--trials must be at least 1");
#ifdef GENLOGIC_LIMIT_MUTANT
  const auto engine = genlogic::testing::mutant_engine();
#else
  const auto engine = genlogic::oracle::default_engine();
#endif
  const auto report = genlogic::oracle::check_theorems(in.trials, in.seed, engine);
  emit(report.to_json(), in);
  return report.all_passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact probabilistic inference over logic models induced by data"};
  app.require_subcommand(1);
  Inputs in;

  auto add_table_opts = [&](CLI::App* sub) {
    sub->add_option("--data", in.data, "CSV of 0/1 rows, header naming every ground atom");
    sub->add_option("--prior", in.prior, "mle, uniform, or a prior JSON file");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--vocab", in.vocab, "vocabulary JSON")->required();
    sub->add_flag("--json", in.compact, "single-line JSON output");
  };
  auto add_given = [&](CLI::App* sub) {
    sub->add_option("--given", in.given, "condition formula (repeatable)")->allow_extra_args(false);
  };

  auto* query = app.add_subcommand("query", "conditional probability of a formula");
  add_common(query);
  add_table_opts(query);
  add_given(query);
  query->add_option("--sem", in.sem, "strict, limit, or mu=N/D");
  query->add_option("formula", in.alpha)->required();

  auto* marginal = app.add_subcommand("marginal", "marginal probability of a formula");
  add_common(marginal);
  add_table_opts(marginal);
  marginal->add_option("formula", in.alpha)->required();

  auto* update = app.add_subcommand("update", "incremental marginal after one more datum");
  add_common(update);
  add_table_opts(update);
  update->add_option("--row", in.row, "new datum: bit string or atom=0|1,...")->required();
  update->add_flag("--write", in.write, "append the row to the data file");
  update->add_option("formula", in.alpha)->required();

  auto* entail = app.add_subcommand("entail", "classical entailment by model enumeration");
  add_common(entail);
  add_given(entail);
  entail->add_option("formula", in.alpha)->required();

  auto* mcs = app.add_subcommand("mcs", "maximum-cardinality consistent subsets");
  add_common(mcs);
  add_table_opts(mcs);
  add_given(mcs);

  auto* check = app.add_subcommand("check", "randomized theorem checks against the brute-force oracle");
  check->add_option("--trials", in.trials, "number of random instances");
  check->add_option("--seed", in.seed, "master seed");
  check->add_flag("--json", in.compact, "single-line JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (query->parsed()) return cmd_query(in);
    if (marginal->parsed()) return cmd_marginal(in);
    if (update->parsed()) return cmd_update(in);
    if (entail->parsed()) return cmd_entail(in);
    if (mcs->parsed()) return cmd_mcs(in);
    if (check->parsed()) return cmd_check(in);
  } catch (const genlogic::Error& e) {
    std::cerr << "genlogic: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

#pragma once

// Data rows, the models they map to, and the prior over models.
//
// Each CSV row is one datum; identical rows aggregate into one model with a
// count. Under the MLE prior a model's weight is its count over the total.
// Models that never appear are implicit and carry prior 0.

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "genlogic/formula.hpp"
#include "genlogic/rational.hpp"

namespace genlogic {

class DataError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultEnumerationBound = 20;

enum class PriorMode { Mle, Uniform, Explicit };

inline const char* to_string(PriorMode mode) {
  switch (mode) {
    case PriorMode::Mle: return "mle";
    case PriorMode::Uniform: return "uniform";
    default: return "explicit";
  }
}

struct PriorSpec {
  PriorMode mode = PriorMode::Mle;
  std::vector<std::pair<Model, Rational>> weights;  // Explicit only

  static PriorSpec mle() { return {}; }
  static PriorSpec uniform() { return {PriorMode::Uniform, {}}; }
  static PriorSpec explicit_weights(std::vector<std::pair<Model, Rational>> w) {
    return {PriorMode::Explicit, std::move(w)};
  }

  // {"mode":"mle"|"uniform"|"explicit","weights":[{"model":"0101","w":"3/10"}]}
  static PriorSpec from_json(const nlohmann::json& j, const VocabularyPtr& vocab) {
    try {
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "mle") return mle();
      if (mode == "uniform") return uniform();
      if (mode != "explicit") throw DataError("unknown prior mode '" + mode + "'");
      std::vector<std::pair<Model, Rational>> w;
      for (const auto& entry : j.at("weights")) {
        const auto& wj = entry.at("w");
        const Rational weight = wj.is_string() ? parse_rational(wj.get<std::string>())
                                : wj.is_number_integer() ? Rational(wj.get<std::int64_t>())
                                : throw DataError("prior weight must be a \"num/den\" string");
        w.emplace_back(Model::from_string(vocab, entry.at("model").get<std::string>()), weight);
      }
      return explicit_weights(std::move(w));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed prior JSON: ") + e.what());
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"mode", to_string(mode)}};
    if (mode == PriorMode::Explicit) {
      j["weights"] = nlohmann::json::array();
      for (const auto& [m, w] : weights) j["weights"].push_back({{"model", m.to_string()}, {"w", format_rational(w)}});
    }
    return j;
  }
};

// An immutable snapshot of models, their data counts, and their prior.
class WorldTable {
 public:
  struct Row {
    Model model;
    std::uint64_t count = 0;
  };

  // MLE table over the given data rows, one model per datum.
  static WorldTable from_data(VocabularyPtr vocab, std::span<const Model> data) {
    WorldTable t(std::move(vocab), PriorMode::Mle);
    for (const Model& m : data) t.add_in_place(m);
    return t;
  }

  const VocabularyPtr& vocabulary() const { return vocab_; }
  PriorMode mode() const { return mode_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  // K, the number of data.
  std::uint64_t total() const { return total_; }

  // phi_n for row n.
  Rational prior(std::size_t n) const {
    if (mode_ == PriorMode::Mle) {
      if (total_ == 0) throw DataError("MLE prior undefined without data");
      return Rational(Integer(rows_[n].count), Integer(total_));
    }
    return weights_[n];
  }

  bool supported(std::size_t n) const {
    return mode_ == PriorMode::Mle ? rows_[n].count > 0 : weights_[n] > 0;
  }

  std::size_t support_size() const {
    std::size_t s = 0;
    for (std::size_t n = 0; n < rows_.size(); ++n) s += supported(n);
    return s;
  }

  std::optional<std::size_t> find(const Model& m) const {
    const auto it = index_.find(m.bits());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Rational prior_of(const Model& m) const {
    require_same_vocabulary(vocab_, m.vocabulary());
    const auto n = find(m);
    return n ? prior(*n) : Rational(0);
  }

  // One more datum. Only MLE tables accept data; explicit and uniform priors
  // are fixed.
  WorldTable add_datum(const Model& row) const& {
    WorldTable copy = *this;
    return std::move(copy).add_datum(row);
  }

  WorldTable add_datum(const Model& row) && {
    require_same_vocabulary(vocab_, row.vocabulary());
    if (mode_ != PriorMode::Mle)
      throw DataError(std::string("cannot add data to a table with a fixed ") + to_string(mode_) + " prior");
    add_in_place(row);
    return std::move(*this);
  }

  // Equal as maps from model to (count, prior); row order is irrelevant.
  friend bool operator==(const WorldTable& a, const WorldTable& b) {
    if (!same_vocabulary(a.vocab_, b.vocab_) || a.mode_ != b.mode_ || a.total_ != b.total_) return false;
    auto listed = [](const WorldTable& t) {
      std::size_t n = 0;
      for (std::size_t i = 0; i < t.rows_.size(); ++i) n += t.rows_[i].count > 0 || t.supported(i);
      return n;
    };
    if (listed(a) != listed(b)) return false;
    for (std::size_t i = 0; i < a.rows_.size(); ++i) {
      if (a.rows_[i].count == 0 && !a.supported(i)) continue;
      const auto j = b.find(a.rows_[i].model);
      if (!j || b.rows_[*j].count != a.rows_[i].count || b.prior(*j) != a.prior(i)) return false;
    }
    return true;
  }

 private:
  WorldTable(VocabularyPtr vocab, PriorMode mode) : vocab_(std::move(vocab)), mode_(mode) {}

  std::size_t insert(const Model& m) {
    const auto [it, fresh] = index_.try_emplace(m.bits(), rows_.size());
    if (fresh) {
      rows_.push_back({m, 0});
      if (mode_ != PriorMode::Mle) weights_.emplace_back(0);
    }
    return it->second;
  }

  void add_in_place(const Model& m) {
    require_same_vocabulary(vocab_, m.vocabulary());
    ++rows_[insert(m)].count;
    ++total_;
  }

  VocabularyPtr vocab_;
  PriorMode mode_;
  std::vector<Row> rows_;
  std::vector<Rational> weights_;  // non-MLE only, parallel to rows_
  std::unordered_map<std::vector<bool>, std::size_t> index_;
  std::uint64_t total_ = 0;

  friend WorldTable build_prior(const PriorSpec&, const VocabularyPtr&, const std::optional<WorldTable>&);
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on commas outside parentheses, so "p(a,b),q" is two fields.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '(') ++depth;
    else if (line[i] == ')') --depth;
    else if (line[i] == ',' && depth == 0) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(line.substr(start)));
  return out;
}

inline std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t') out += c;
  return out;
}

}  // namespace detail

// Header names every ground atom once, in any order; cells are 0 or 1.
inline WorldTable ingest_csv(std::istream& in, const VocabularyPtr& vocab) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw DataError("empty CSV: missing header");

  const std::size_t atoms = vocab->atom_count();
  std::vector<std::size_t> column_atom;
  std::vector<bool> seen(atoms, false);
  for (std::string_view name : detail::split_fields(line)) {
    const std::string key = detail::strip_spaces(name);
    const auto idx = vocab->atom_index(key);
    if (!idx) throw DataError("unknown column '" + key + "'");
    if (seen[*idx]) throw DataError("duplicate column '" + key + "'");
    seen[*idx] = true;
    column_atom.push_back(*idx);
  }
  for (std::size_t i = 0; i < atoms; ++i)
    if (!seen[i]) throw DataError("missing column '" + vocab->atom_name(i) + "'");

  std::vector<Model> data;
  while (next_line()) {
    std::vector<bool> bits(atoms, false);
    std::size_t col = 0;
    for (std::string_view cell : detail::split_fields(line)) {
      if (col >= column_atom.size())
        throw DataError("line " + std::to_string(line_no) + ": too many cells");
      if (cell != "0" && cell != "1")
        throw DataError("line " + std::to_string(line_no) + ": non-binary cell '" + std::string(cell) + "'");
      bits[column_atom[col++]] = cell == "1";
    }
    if (col != column_atom.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(column_atom.size()) +
                      " cells, found " + std::to_string(col));
    data.emplace_back(vocab, std::move(bits));
  }
  if (data.empty()) throw DataError("CSV has no data rows");
  return WorldTable::from_data(vocab, data);
}

// K_n / K for every listed model.
inline std::vector<Rational> mle_prior(const WorldTable& table) {
  if (table.total() == 0) throw DataError("MLE prior undefined without data");
  std::vector<Rational> phi;
  phi.reserve(table.size());
  for (const auto& row : table.rows()) phi.emplace_back(Integer(row.count), Integer(table.total()));
  return phi;
}

// All 2^A models, first atom as the most significant bit.
inline std::vector<Model> enumerate_models(const VocabularyPtr& vocab,
                                           std::size_t max_atoms = kDefaultEnumerationBound) {
  const std::size_t a = vocab->atom_count();
  if (a > max_atoms || a >= 63)
    throw DataError("cannot enumerate 2^" + std::to_string(a) + " models (bound is " + std::to_string(max_atoms) +
                    " atoms)");
  std::vector<Model> out;
  out.reserve(std::size_t{1} << a);
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << a); ++i) {
    std::vector<bool> bits(a);
    for (std::size_t j = 0; j < a; ++j) bits[j] = (i >> (a - 1 - j)) & 1U;
    out.emplace_back(vocab, std::move(bits));
  }
  return out;
}

// The table a prior spec describes. MLE returns the data table itself;
// Uniform and Explicit keep data counts (if any) for reporting only.
inline WorldTable build_prior(const PriorSpec& spec, const VocabularyPtr& vocab,
                              const std::optional<WorldTable>& data = std::nullopt) {
  if (data) require_same_vocabulary(vocab, data->vocabulary());
  if (spec.mode == PriorMode::Mle) {
    if (!data) throw DataError("MLE prior requires data");
    if (data->mode() != PriorMode::Mle) throw DataError("MLE prior requires a data table");
    if (data->total() == 0) throw DataError("MLE prior undefined without data");
    return *data;
  }

  WorldTable t(vocab, spec.mode);
  if (spec.mode == PriorMode::Uniform) {
    const auto models = enumerate_models(vocab);
    const Rational w(Integer(1), Integer(1) << vocab->atom_count());
    for (const Model& m : models) t.weights_[t.insert(m)] = w;
  } else {
    Rational sum = 0;
    for (const auto& [m, w] : spec.weights) {
      require_same_vocabulary(vocab, m.vocabulary());
      if (w < 0) throw DataError("negative prior weight for model " + m.to_string());
      if (t.find(m)) throw DataError("model " + m.to_string() + " listed twice in prior");
      t.weights_[t.insert(m)] = w;
      sum += w;
    }
    if (sum != 1) throw DataError("prior weights sum to " + format_rational(sum) + ", not 1");
  }
  if (data) {
    for (const auto& row : data->rows()) {
      t.rows_[t.insert(row.model)].count += row.count;
      t.total_ += row.count;
    }
  }
  return t;
}

// Either a bit string in canonical order ("10") or "bird=1,fly=0" naming
// every atom.
inline Model parse_assignment(std::string_view text, const VocabularyPtr& vocab) {
  text = detail::trim(text);
  if (text.find('=') == std::string_view::npos) return Model::from_string(vocab, text);
  std::vector<int> bits(vocab->atom_count(), -1);
  for (std::string_view field : detail::split_fields(text)) {
    const auto eq = field.rfind('=');
    if (eq == std::string_view::npos) throw DataError("expected atom=0|1, found '" + std::string(field) + "'");
    const std::string name = detail::strip_spaces(field.substr(0, eq));
    const std::string_view value = detail::trim(field.substr(eq + 1));
    const auto idx = vocab->atom_index(name);
    if (!idx) throw DataError("unknown atom '" + name + "'");
    if (value != "0" && value != "1") throw DataError("non-binary value for '" + name + "'");
    if (bits[*idx] != -1) throw DataError("atom '" + name + "' assigned twice");
    bits[*idx] = value == "1";
  }
  std::vector<bool> out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == -1) throw DataError("atom '" + vocab->atom_name(i) + "' not assigned");
    out.push_back(bits[i] == 1);
  }
  return Model(vocab, std::move(out));
}

}  // namespace genlogic

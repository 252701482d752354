#pragma once

// Vocabularies, models, and closed function-free formulae over them.
//
// A Vocabulary fixes the ground atoms (propositions first, in declaration
// order, then every predicate applied to every tuple of constants, predicates
// ordered by name and tuples lexicographically by constant declaration
// index). A Model is one bit per ground atom in that order. Formulae are
// immutable shared ASTs; quantifiers range over the finite constant list and
// are compiled away by grounding before evaluation.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "genlogic/rational.hpp"

namespace genlogic {

class VocabularyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnboundVariable, UnknownSymbol, ArityMismatch };

  ParseError(Kind kind, std::size_t position, const std::string& message,
             std::vector<std::string> expected = {})
      : Error(compose(position, message, expected)),
        kind_(kind),
        position_(position),
        expected_(std::move(expected)) {}

  Kind kind() const { return kind_; }
  // Byte offset into the parsed text.
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string compose(std::size_t position, const std::string& message,
                             const std::vector<std::string>& expected) {
    std::string out = "at position " + std::to_string(position) + ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  Kind kind_;
  std::size_t position_;
  std::vector<std::string> expected_;
};

class GroundingError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s.substr(1))
    if (!alpha(c) && !digit(c)) return false;
  return s != "forall" && s != "exists";
}

}  // namespace detail

struct Predicate {
  std::string name;
  std::size_t arity = 0;

  bool operator==(const Predicate&) const = default;
};

class Vocabulary;
using VocabularyPtr = std::shared_ptr<const Vocabulary>;

class Vocabulary {
 public:
  static constexpr std::size_t kMaxAtoms = std::size_t{1} << 20;

  Vocabulary(std::vector<std::string> propositions, std::vector<Predicate> predicates,
             std::vector<std::string> constants)
      : propositions_(std::move(propositions)),
        predicates_(std::move(predicates)),
        constants_(std::move(constants)) {
    std::unordered_map<std::string, int> symbols;
    for (const auto& p : propositions_) {
      check_name(p, "proposition");
      if (!symbols.emplace(p, 0).second) throw VocabularyError("duplicate symbol '" + p + "'");
    }
    for (const auto& p : predicates_) {
      check_name(p.name, "predicate");
      if (p.arity == 0)
        throw VocabularyError("predicate '" + p.name + "' has arity 0; declare a proposition instead");
      if (!symbols.emplace(p.name, 0).second)
        throw VocabularyError("duplicate symbol '" + p.name + "'");
    }
    for (std::size_t i = 0; i < constants_.size(); ++i) {
      check_name(constants_[i], "constant");
      if (!constant_index_.emplace(constants_[i], i).second)
        throw VocabularyError("duplicate constant '" + constants_[i] + "'");
    }

    for (std::size_t i = 0; i < propositions_.size(); ++i) {
      proposition_index_.emplace(propositions_[i], i);
      atom_names_.push_back(propositions_[i]);
    }
    std::vector<const Predicate*> by_name;
    for (const auto& p : predicates_) by_name.push_back(&p);
    std::sort(by_name.begin(), by_name.end(),
              [](const Predicate* a, const Predicate* b) { return a->name < b->name; });
    const std::size_t c = constants_.size();
    for (const Predicate* p : by_name) {
      std::size_t tuples = 1;
      for (std::size_t i = 0; i < p->arity; ++i) {
        if (c != 0 && tuples > kMaxAtoms / c) throw VocabularyError("vocabulary has too many ground atoms");
        tuples *= c;
      }
      if (c == 0) tuples = 0;
      layout_.emplace(p->name, Layout{atom_names_.size(), p->arity});
      std::vector<std::size_t> args(p->arity, 0);
      for (std::size_t t = 0; t < tuples; ++t) {
        std::string name = p->name + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (i > 0) name += ",";
          name += constants_[args[i]];
        }
        atom_names_.push_back(name + ")");
        if (atom_names_.size() > kMaxAtoms) throw VocabularyError("vocabulary has too many ground atoms");
        for (std::size_t i = args.size(); i-- > 0;) {
          if (++args[i] < c) break;
          args[i] = 0;
        }
      }
    }
    for (std::size_t i = 0; i < atom_names_.size(); ++i) atom_index_.emplace(atom_names_[i], i);
  }

  static VocabularyPtr make(std::vector<std::string> propositions, std::vector<Predicate> predicates = {},
                            std::vector<std::string> constants = {}) {
    return std::make_shared<const Vocabulary>(std::move(propositions), std::move(predicates),
                                              std::move(constants));
  }

  // {"propositions":[...],"predicates":[{"name":...,"arity":...}],"constants":[...]}
  static VocabularyPtr from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw VocabularyError("vocabulary JSON must be an object");
    std::vector<std::string> props, consts;
    std::vector<Predicate> preds;
    try {
      if (j.contains("propositions")) props = j.at("propositions").get<std::vector<std::string>>();
      if (j.contains("constants")) consts = j.at("constants").get<std::vector<std::string>>();
      if (j.contains("predicates"))
        for (const auto& p : j.at("predicates"))
          preds.push_back({p.at("name").get<std::string>(), p.at("arity").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw VocabularyError(std::string("malformed vocabulary JSON: ") + e.what());
    }
    return make(std::move(props), std::move(preds), std::move(consts));
  }

  nlohmann::json to_json() const {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : predicates_) preds.push_back({{"name", p.name}, {"arity", p.arity}});
    return {{"propositions", propositions_}, {"predicates", preds}, {"constants", constants_}};
  }

  const std::vector<std::string>& propositions() const { return propositions_; }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  const std::vector<std::string>& constants() const { return constants_; }

  std::size_t atom_count() const { return atom_names_.size(); }
  const std::string& atom_name(std::size_t i) const { return atom_names_.at(i); }
  const std::vector<std::string>& atom_names() const { return atom_names_; }

  std::optional<std::size_t> atom_index(const std::string& name) const {
    const auto it = atom_index_.find(name);
    if (it == atom_index_.end()) return std::nullopt;
    return it->second;
  }

  bool is_proposition(const std::string& name) const { return proposition_index_.contains(name); }
  std::size_t proposition_atom(const std::string& name) const { return proposition_index_.at(name); }

  std::optional<std::size_t> predicate_arity(std::string_view name) const {
    const auto it = layout_.find(name);
    if (it == layout_.end()) return std::nullopt;
    return it->second.arity;
  }

  std::optional<std::size_t> constant_index(const std::string& name) const {
    const auto it = constant_index_.find(name);
    if (it == constant_index_.end()) return std::nullopt;
    return it->second;
  }

  // Index of pred(c_1,...,c_k) given constant indices.
  std::size_t predicate_atom(std::string_view name, std::span<const std::size_t> args) const {
    const auto it = layout_.find(name);
    if (it == layout_.end() || it->second.arity != args.size())
      throw VocabularyError("no predicate '" + std::string(name) + "' with arity " + std::to_string(args.size()));
    std::size_t offset = 0;
    for (std::size_t a : args) offset = offset * constants_.size() + a;
    return it->second.offset + offset;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.propositions_ == b.propositions_ && a.predicates_ == b.predicates_ && a.constants_ == b.constants_;
  }

 private:
  struct Layout {
    std::size_t offset;
    std::size_t arity;
  };

  static void check_name(const std::string& name, const char* what) {
    if (!detail::is_identifier(name))
      throw VocabularyError(std::string("invalid ") + what + " name '" + name + "'");
  }

  std::vector<std::string> propositions_;
  std::vector<Predicate> predicates_;
  std::vector<std::string> constants_;
  std::map<std::string, Layout, std::less<>> layout_;
  std::vector<std::string> atom_names_;
  std::unordered_map<std::string, std::size_t> atom_index_;
  std::unordered_map<std::string, std::size_t> proposition_index_;
  std::unordered_map<std::string, std::size_t> constant_index_;
};

inline bool same_vocabulary(const VocabularyPtr& a, const VocabularyPtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_vocabulary(const VocabularyPtr& a, const VocabularyPtr& b) {
  if (!same_vocabulary(a, b)) throw VocabularyError("vocabulary mismatch");
}

// A total truth assignment over a vocabulary's ground atoms.
class Model {
 public:
  Model(VocabularyPtr vocab, std::vector<bool> bits) : vocab_(std::move(vocab)), bits_(std::move(bits)) {
    if (!vocab_) throw VocabularyError("model without vocabulary");
    if (bits_.size() != vocab_->atom_count())
      throw VocabularyError("model has " + std::to_string(bits_.size()) + " bits, vocabulary has " +
                            std::to_string(vocab_->atom_count()) + " atoms");
  }

  // "0101" in canonical atom order.
  static Model from_string(VocabularyPtr vocab, std::string_view bits) {
    std::vector<bool> v;
    v.reserve(bits.size());
    for (char c : bits) {
      if (c != '0' && c != '1') throw VocabularyError("model string '" + std::string(bits) + "' is not binary");
      v.push_back(c == '1');
    }
    return Model(std::move(vocab), std::move(v));
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s += b ? '1' : '0';
    return s;
  }

  bool operator[](std::size_t atom) const { return bits_[atom]; }
  std::size_t size() const { return bits_.size(); }
  const std::vector<bool>& bits() const { return bits_; }
  const VocabularyPtr& vocabulary() const { return vocab_; }

  friend bool operator==(const Model& a, const Model& b) {
    return a.bits_ == b.bits_ && same_vocabulary(a.vocab_, b.vocab_);
  }
  friend auto operator<=>(const Model& a, const Model& b) { return a.bits_ <=> b.bits_; }

 private:
  VocabularyPtr vocab_;
  std::vector<bool> bits_;
};

enum class FormulaKind { Atom, Not, And, Or, Implies, Iff, Forall, Exists };

struct Term {
  enum class Kind { Constant, Variable };
  Kind kind = Kind::Constant;
  std::string name;

  static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
  static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
  bool is_variable() const { return kind == Kind::Variable; }

  bool operator==(const Term&) const = default;
};

class Formula;
Formula ground(const Formula& f);

class Formula {
 public:
  // Proposition if args is empty, otherwise a predicate application.
  static Formula atom(VocabularyPtr vocab, std::string name, std::vector<Term> args = {}) {
    if (!vocab) throw VocabularyError("formula without vocabulary");
    auto n = std::make_shared<Node>(FormulaKind::Atom, vocab);
    if (args.empty()) {
      if (!vocab->is_proposition(name)) {
        if (vocab->predicate_arity(name))
          throw VocabularyError("predicate '" + name + "' used without arguments");
        throw VocabularyError("unknown proposition '" + name + "'");
      }
      n->atom_index = vocab->proposition_atom(name);
    } else {
      const auto arity = vocab->predicate_arity(name);
      if (!arity) throw VocabularyError("unknown predicate '" + name + "'");
      if (*arity != args.size())
        throw VocabularyError("predicate '" + name + "' has arity " + std::to_string(*arity) + ", given " +
                              std::to_string(args.size()));
      std::vector<std::size_t> indices;
      for (const Term& t : args) {
        if (t.is_variable()) {
          if (!detail::is_identifier(t.name)) throw VocabularyError("invalid variable name '" + t.name + "'");
          n->free_vars.push_back(t.name);
        } else {
          const auto c = vocab->constant_index(t.name);
          if (!c) throw VocabularyError("unknown constant '" + t.name + "'");
          indices.push_back(*c);
        }
      }
      if (n->free_vars.empty()) n->atom_index = vocab->predicate_atom(name, indices);
      normalize(n->free_vars);
    }
    n->name = std::move(name);
    n->terms = std::move(args);
    return Formula(std::move(n));
  }

  static Formula negation(const Formula& f) { return unary(FormulaKind::Not, f); }
  static Formula conjunction(const Formula& a, const Formula& b) { return binary(FormulaKind::And, a, b); }
  static Formula disjunction(const Formula& a, const Formula& b) { return binary(FormulaKind::Or, a, b); }
  static Formula implication(const Formula& a, const Formula& b) { return binary(FormulaKind::Implies, a, b); }
  static Formula equivalence(const Formula& a, const Formula& b) { return binary(FormulaKind::Iff, a, b); }
  static Formula forall(std::string var, const Formula& body) { return quantifier(FormulaKind::Forall, std::move(var), body); }
  static Formula exists(std::string var, const Formula& body) { return quantifier(FormulaKind::Exists, std::move(var), body); }

  static Formula binary(FormulaKind kind, const Formula& a, const Formula& b) {
    require_same_vocabulary(a.vocabulary(), b.vocabulary());
    auto n = std::make_shared<Node>(kind, a.vocabulary());
    n->left = a.node_;
    n->right = b.node_;
    n->free_vars = a.node_->free_vars;
    n->free_vars.insert(n->free_vars.end(), b.node_->free_vars.begin(), b.node_->free_vars.end());
    normalize(n->free_vars);
    return Formula(std::move(n));
  }

  FormulaKind kind() const { return node_->kind; }
  const VocabularyPtr& vocabulary() const { return node_->vocab; }

  // Atom accessors.
  const std::string& symbol() const { return node_->name; }
  const std::vector<Term>& terms() const { return node_->terms; }
  std::optional<std::size_t> atom_index() const { return node_->atom_index; }

  // Not: operand(); binary: lhs()/rhs(); quantifiers: variable()/body().
  Formula operand() const { return Formula(node_->left); }
  Formula lhs() const { return Formula(node_->left); }
  Formula rhs() const { return Formula(node_->right); }
  const std::string& variable() const { return node_->name; }
  Formula body() const { return Formula(node_->left); }

  bool is_closed() const { return node_->free_vars.empty(); }
  const std::vector<std::string>& free_variables() const { return node_->free_vars; }

  bool is_quantifier_free() const {
    switch (kind()) {
      case FormulaKind::Atom: return true;
      case FormulaKind::Not: return operand().is_quantifier_free();
      case FormulaKind::Forall:
      case FormulaKind::Exists: return false;
      default: return lhs().is_quantifier_free() && rhs().is_quantifier_free();
    }
  }

  // Replace free occurrences of var by the constant.
  Formula substitute(const std::string& var, const std::string& constant) const {
    if (!std::binary_search(node_->free_vars.begin(), node_->free_vars.end(), var)) return *this;
    switch (kind()) {
      case FormulaKind::Atom: {
        std::vector<Term> args = terms();
        for (Term& t : args)
          if (t.is_variable() && t.name == var) t = Term::constant(constant);
        return atom(vocabulary(), symbol(), std::move(args));
      }
      case FormulaKind::Not: return negation(operand().substitute(var, constant));
      case FormulaKind::Forall:
      case FormulaKind::Exists: return quantifier(kind(), variable(), body().substitute(var, constant));
      default: return binary(kind(), lhs().substitute(var, constant), rhs().substitute(var, constant));
    }
  }

  std::string to_string() const {
    std::string out;
    print(out, *node_);
    return out;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    return same_vocabulary(a.vocabulary(), b.vocabulary()) && equal_nodes(*a.node_, *b.node_);
  }

 private:
  struct Node {
    Node(FormulaKind k, VocabularyPtr v) : kind(k), vocab(std::move(v)) {}

    FormulaKind kind;
    VocabularyPtr vocab;
    std::string name;  // atom symbol, or bound variable for quantifiers
    std::vector<Term> terms;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::optional<std::size_t> atom_index;  // set for ground atoms
    std::vector<std::string> free_vars;     // sorted, unique

    mutable std::once_flag grounded_once;
    mutable std::shared_ptr<const Node> grounded;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static void normalize(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  static Formula unary(FormulaKind kind, const Formula& f) {
    auto n = std::make_shared<Node>(kind, f.vocabulary());
    n->left = f.node_;
    n->free_vars = f.node_->free_vars;
    return Formula(std::move(n));
  }

  static Formula quantifier(FormulaKind kind, std::string var, const Formula& body) {
    if (!detail::is_identifier(var)) throw VocabularyError("invalid variable name '" + var + "'");
    if (body.vocabulary()->constant_index(var))
      throw VocabularyError("quantified variable '" + var + "' clashes with a constant");
    auto n = std::make_shared<Node>(kind, body.vocabulary());
    n->left = body.node_;
    n->free_vars = body.node_->free_vars;
    std::erase(n->free_vars, var);
    n->name = std::move(var);
    return Formula(std::move(n));
  }

  static bool equal_nodes(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind || a.name != b.name || a.terms != b.terms) return false;
    if (bool(a.left) != bool(b.left) || bool(a.right) != bool(b.right)) return false;
    if (a.left && !equal_nodes(*a.left, *b.left)) return false;
    if (a.right && !equal_nodes(*a.right, *b.right)) return false;
    return true;
  }

  // Binding strength; quantifiers bind loosest because their body extends to
  // the right as far as possible.
  static int precedence(FormulaKind k) {
    switch (k) {
      case FormulaKind::Forall:
      case FormulaKind::Exists: return 0;
      case FormulaKind::Iff: return 1;
      case FormulaKind::Implies: return 2;
      case FormulaKind::Or: return 3;
      case FormulaKind::And: return 4;
      default: return 5;
    }
  }

  static void print_child(std::string& out, const Node& child, bool parens) {
    if (parens) out += "(";
    print(out, child);
    if (parens) out += ")";
  }

  static void print(std::string& out, const Node& n) {
    switch (n.kind) {
      case FormulaKind::Atom:
        out += n.name;
        if (!n.terms.empty()) {
          out += "(";
          for (std::size_t i = 0; i < n.terms.size(); ++i) {
            if (i > 0) out += ",";
            out += n.terms[i].name;
          }
          out += ")";
        }
        return;
      case FormulaKind::Not:
        out += "!";
        print_child(out, *n.left, precedence(n.left->kind) < 5);
        return;
      case FormulaKind::Forall:
      case FormulaKind::Exists:
        out += n.kind == FormulaKind::Forall ? "forall " : "exists ";
        out += n.name;
        out += ". ";
        print(out, *n.left);
        return;
      default: {
        const int p = precedence(n.kind);
        const bool right_assoc = n.kind == FormulaKind::Implies;
        const int lp = precedence(n.left->kind);
        const int rp = precedence(n.right->kind);
        print_child(out, *n.left, lp == 0 || lp < p || (lp == p && right_assoc));
        switch (n.kind) {
          case FormulaKind::And: out += " & "; break;
          case FormulaKind::Or: out += " | "; break;
          case FormulaKind::Implies: out += " -> "; break;
          default: out += " <-> "; break;
        }
        print_child(out, *n.right, rp == 0 || rp < p || (rp == p && !right_assoc));
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;

  friend Formula ground(const Formula& f);
};

// Quantifier-free equivalent: forall becomes the conjunction over constants
// in declaration order, exists the disjunction. Memoized on the formula.
inline Formula ground(const Formula& f) {
  if (!f.is_closed())
    throw GroundingError("cannot ground open formula '" + f.to_string() + "'");
  const auto& node = *f.node_;
  std::call_once(node.grounded_once, [&] {
    switch (node.kind) {
      case FormulaKind::Atom:
        node.grounded = f.node_;
        break;
      case FormulaKind::Not: {
        const Formula g = ground(f.operand());
        node.grounded = g.node_ == node.left ? f.node_ : Formula::negation(g).node_;
        break;
      }
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        const auto& constants = f.vocabulary()->constants();
        if (constants.empty())
          throw GroundingError("quantifier over an empty constant list in '" + f.to_string() + "'");
        const FormulaKind join = node.kind == FormulaKind::Forall ? FormulaKind::And : FormulaKind::Or;
        std::optional<Formula> acc;
        for (const auto& c : constants) {
          Formula instance = ground(f.body().substitute(f.variable(), c));
          acc = acc ? Formula::binary(join, *acc, instance) : instance;
        }
        node.grounded = acc->node_;
        break;
      }
      default: {
        const Formula a = ground(f.lhs());
        const Formula b = ground(f.rhs());
        node.grounded = a.node_ == node.left && b.node_ == node.right
                            ? f.node_
                            : Formula::binary(node.kind, a, b).node_;
        break;
      }
    }
  });
  return Formula(node.grounded);
}

namespace detail {

inline bool eval_ground(const Formula& g, const Model& m) {
  switch (g.kind()) {
    case FormulaKind::Atom: return m[*g.atom_index()];
    case FormulaKind::Not: return !eval_ground(g.operand(), m);
    case FormulaKind::And: return eval_ground(g.lhs(), m) && eval_ground(g.rhs(), m);
    case FormulaKind::Or: return eval_ground(g.lhs(), m) || eval_ground(g.rhs(), m);
    case FormulaKind::Implies: return !eval_ground(g.lhs(), m) || eval_ground(g.rhs(), m);
    case FormulaKind::Iff: return eval_ground(g.lhs(), m) == eval_ground(g.rhs(), m);
    default: throw GroundingError("quantifier in grounded formula");
  }
}

}  // namespace detail

// Classical truth of f in m: 1 iff m satisfies f.
inline bool eval(const Formula& f, const Model& m) {
  require_same_vocabulary(f.vocabulary(), m.vocabulary());
  return detail::eval_ground(ground(f), m);
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, VocabularyPtr vocab) : text_(text), vocab_(std::move(vocab)) { advance(); }

  Formula parse() {
    Formula f = parse_iff();
    if (tok_.type != Tok::End) syntax("unexpected " + describe(tok_), {"end of input", "'&'", "'|'", "'->'", "'<->'"});
    return f;
  }

 private:
  enum class Tok { Ident, LParen, RParen, Comma, Dot, Not, And, Or, Implies, Iff, Forall, Exists, End };

  struct Token {
    Tok type = Tok::End;
    std::string text;
    std::size_t pos = 0;
  };

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::Ident: return "identifier '" + t.text + "'";
      case Tok::End: return "end of input";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void syntax(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError(ParseError::Kind::Syntax, tok_.pos, msg, std::move(expected));
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
    tok_.pos = pos_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::End, "", pos_};
      return;
    }
    static const std::pair<std::string_view, Tok> symbols[] = {
        {"<->", Tok::Iff},      {"->", Tok::Implies},   {"!", Tok::Not},         {"&", Tok::And},
        {"|", Tok::Or},         {"(", Tok::LParen},     {")", Tok::RParen},      {",", Tok::Comma},
        {".", Tok::Dot},        {"\xC2\xAC", Tok::Not}, {"\xE2\x88\xA7", Tok::And}, {"\xE2\x88\xA8", Tok::Or},
        {"\xE2\x86\x92", Tok::Implies}, {"\xE2\x86\x94", Tok::Iff}, {"\xE2\x88\x80", Tok::Forall},
        {"\xE2\x88\x83", Tok::Exists},
    };
    for (const auto& [s, t] : symbols) {
      if (starts_with(s)) {
        tok_ = {t, std::string(s), pos_};
        pos_ += s.size();
        return;
      }
    }
    auto ident_char = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    };
    const char c = text_[pos_];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      std::string word(text_.substr(pos_, end - pos_));
      const Tok t = word == "forall" ? Tok::Forall : word == "exists" ? Tok::Exists : Tok::Ident;
      tok_ = {t, std::move(word), pos_};
      pos_ = end;
      return;
    }
    throw ParseError(ParseError::Kind::Syntax, pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (tok_.type == Tok::Iff) {
      advance();
      f = Formula::equivalence(f, parse_implies());
    }
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (tok_.type == Tok::Implies) {
      advance();
      return Formula::implication(f, parse_implies());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (tok_.type == Tok::Or) {
      advance();
      f = Formula::disjunction(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (tok_.type == Tok::And) {
      advance();
      f = Formula::conjunction(f, parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    switch (tok_.type) {
      case Tok::Not:
        advance();
        return Formula::negation(parse_unary());
      case Tok::Forall:
      case Tok::Exists: {
        const Tok q = tok_.type;
        advance();
        if (tok_.type != Tok::Ident) syntax("expected a variable, found " + describe(tok_), {"variable"});
        const Token var = tok_;
        if (vocab_->constant_index(var.text))
          syntax("quantified variable '" + var.text + "' clashes with a constant", {"variable"});
        advance();
        if (tok_.type != Tok::Dot) syntax("expected '.' after quantified variable, found " + describe(tok_), {"'.'"});
        advance();
        scope_.push_back(var.text);
        Formula body = parse_iff();
        scope_.pop_back();
        return q == Tok::Forall ? Formula::forall(var.text, body) : Formula::exists(var.text, body);
      }
      case Tok::LParen: {
        advance();
        Formula f = parse_iff();
        if (tok_.type != Tok::RParen) syntax("unbalanced parenthesis, found " + describe(tok_), {"')'"});
        advance();
        return f;
      }
      case Tok::Ident: return parse_atom();
      default:
        syntax("unexpected " + describe(tok_), {"identifier", "'!'", "'('", "'forall'", "'exists'"});
    }
  }

  Formula parse_atom() {
    const Token head = tok_;
    advance();
    if (tok_.type != Tok::LParen) {
      if (vocab_->is_proposition(head.text)) return Formula::atom(vocab_, head.text);
      if (const auto arity = vocab_->predicate_arity(head.text))
        throw ParseError(ParseError::Kind::ArityMismatch, head.pos,
                         "predicate '" + head.text + "' has arity " + std::to_string(*arity) + ", used with 0 arguments");
      throw ParseError(ParseError::Kind::UnknownSymbol, head.pos, "unknown proposition '" + head.text + "'");
    }
    const auto arity = vocab_->predicate_arity(head.text);
    if (!arity) {
      const std::string what = vocab_->is_proposition(head.text) ? "proposition '" + head.text + "' takes no arguments"
                                                                 : "unknown predicate '" + head.text + "'";
      throw ParseError(vocab_->is_proposition(head.text) ? ParseError::Kind::ArityMismatch
                                                         : ParseError::Kind::UnknownSymbol,
                       head.pos, what);
    }
    advance();
    std::vector<Term> args;
    while (true) {
      if (tok_.type != Tok::Ident) syntax("expected a term, found " + describe(tok_), {"variable", "constant"});
      if (std::find(scope_.begin(), scope_.end(), tok_.text) != scope_.end()) {
        args.push_back(Term::variable(tok_.text));
      } else if (vocab_->constant_index(tok_.text)) {
        args.push_back(Term::constant(tok_.text));
      } else {
        throw ParseError(ParseError::Kind::UnboundVariable, tok_.pos,
                         "'" + tok_.text + "' is neither a bound variable nor a declared constant");
      }
      advance();
      if (tok_.type == Tok::Comma) {
        advance();
        continue;
      }
      if (tok_.type == Tok::RParen) break;
      syntax("expected ',' or ')', found " + describe(tok_), {"','", "')'"});
    }
    advance();
    if (args.size() != *arity)
      throw ParseError(ParseError::Kind::ArityMismatch, head.pos,
                       "predicate '" + head.text + "' has arity " + std::to_string(*arity) + ", used with " +
                           std::to_string(args.size()) + " arguments");
    return Formula::atom(vocab_, head.text, std::move(args));
  }

  std::string_view text_;
  VocabularyPtr vocab_;
  std::size_t pos_ = 0;
  Token tok_;
  std::vector<std::string> scope_;
};

}  // namespace detail

// Precedence, tightest first: ! & | -> <->. '->' is right-associative, the
// others left-associative; a quantifier body extends as far right as possible.
inline Formula parse(std::string_view text, const VocabularyPtr& vocab) {
  if (!vocab) throw VocabularyError("parse without vocabulary");
  return detail::Parser(text, vocab).parse();
}

inline std::vector<Formula> parse_all(std::span<const std::string> texts, const VocabularyPtr& vocab) {
  std::vector<Formula> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse(t, vocab));
  return out;
}

}  // namespace genlogic

// clbk :: Formula
//
// Immutable AST for propositional formulas over elementary, general and
// hybrid atoms, with parallel (/\ \/ ->), choice (& |) and negation
// connectives plus env-annotations. Sharing is by reference-counted nodes;
// every operation returns a new value and leaves its input untouched.

#ifndef CLBK_FORMULA_HPP_
#define CLBK_FORMULA_HPP_

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clbk {

  class Error: public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  class ParseError: public Error {
  public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column):
      Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line(line), column(column), message(msg) {}
    std::size_t line, column;
    std::string message;
  };

  using AgentId = std::string;

  inline const AgentId God = "God";

  inline bool valid_agent_id(std::string_view id) noexcept {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"'; });
  }

  enum class AnnotationKind { None, Heuristic, Script };

  // `P{h=name}` (machine heuristic) or `P{s=name}` (environment script)
  struct Annotation {
    AnnotationKind kind = AnnotationKind::None;
    std::string name;

    bool empty() const noexcept { return kind == AnnotationKind::None; }
    friend bool operator==(const Annotation&, const Annotation&) = default;
  };

  enum class Kind { True, False, Elementary, General, Hybrid, Not, And, Or, Implies, Chand, Chor, Env };

  enum class Polarity { Positive, Negative };

  inline Polarity flip(Polarity p) noexcept { return p == Polarity::Positive ? Polarity::Negative : Polarity::Positive; }

  class Formula;

  struct Node {
    Kind kind;
    std::string name;  // atom name, general component of a hybrid, or agent of Env
    std::string elem;  // elementary component of a hybrid
    Annotation ann;
    std::vector<Formula> kids;
  };

  class Formula {
  public:
    static Formula top() { return make(Kind::True); }
    static Formula bottom() { return make(Kind::False); }
    static Formula elementary(std::string name) { return make(Kind::Elementary, std::move(name)); }
    static Formula general(std::string name, Annotation ann = {}) {
      return Formula(std::make_shared<const Node>(Node{Kind::General, std::move(name), {}, std::move(ann), {}}));
    }
    static Formula hybrid(std::string general, std::string elem, Annotation ann = {}) {
      return Formula(std::make_shared<const Node>(Node{Kind::Hybrid, std::move(general), std::move(elem), std::move(ann), {}}));
    }
    static Formula negation(Formula f) { return make(Kind::Not, {}, {std::move(f)}); }
    static Formula conj(Formula l, Formula r) { return make(Kind::And, {}, {std::move(l), std::move(r)}); }
    static Formula disj(Formula l, Formula r) { return make(Kind::Or, {}, {std::move(l), std::move(r)}); }
    static Formula implies(Formula l, Formula r) { return make(Kind::Implies, {}, {std::move(l), std::move(r)}); }
    static Formula chand(std::vector<Formula> branches) { return choice(Kind::Chand, std::move(branches)); }
    static Formula chor(std::vector<Formula> branches) { return choice(Kind::Chor, std::move(branches)); }
    static Formula env(Formula body, AgentId agent) {
      if (!valid_agent_id(agent)) throw Error("invalid agent id '" + agent + "'");
      return make(Kind::Env, std::move(agent), {std::move(body)});
    }

    Kind kind() const noexcept { return node_->kind; }
    const std::string& name() const noexcept { return node_->name; }
    const std::string& elem() const noexcept { return node_->elem; }
    const Annotation& annotation() const noexcept { return node_->ann; }
    const std::vector<Formula>& kids() const noexcept { return node_->kids; }
    std::size_t arity() const noexcept { return node_->kids.size(); }
    // 1-based, matching paths and specifications
    const Formula& operand(std::size_t i) const { return node_->kids.at(i - 1); }
    const AgentId& agent() const noexcept { return node_->name; }

    bool is(Kind k) const noexcept { return node_->kind == k; }
    bool is_atom() const noexcept {
      auto k = kind();
      return k == Kind::True || k == Kind::False || k == Kind::Elementary || k == Kind::General || k == Kind::Hybrid;
    }
    bool is_choice() const noexcept { return kind() == Kind::Chand || kind() == Kind::Chor; }
    bool is_parallel() const noexcept { return kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies; }
    bool is_transparent() const noexcept { return kind() == Kind::Not || kind() == Kind::Env; }

    // Same node kind and payload, new children
    Formula with_kids(std::vector<Formula> kids) const {
      return Formula(std::make_shared<const Node>(Node{kind(), name(), elem(), annotation(), std::move(kids)}));
    }

    friend bool operator==(const Formula& a, const Formula& b) noexcept {
      if (a.node_ == b.node_) return true;
      const Node& x = *a.node_;
      const Node& y = *b.node_;
      return x.kind == y.kind && x.name == y.name && x.elem == y.elem && x.ann == y.ann && x.kids == y.kids;
    }

  private:
    explicit Formula(std::shared_ptr<const Node> n) noexcept: node_(std::move(n)) {}

    static Formula make(Kind k, std::string name = {}, std::vector<Formula> kids = {}) {
      return Formula(std::make_shared<const Node>(Node{k, std::move(name), {}, {}, std::move(kids)}));
    }
    static Formula choice(Kind k, std::vector<Formula> branches) {
      if (branches.size() < 2) throw Error("choice operators need at least two operands");
      return make(k, {}, std::move(branches));
    }

    std::shared_ptr<const Node> node_;
  };

  // Address of a subformula: 1-based child indexes from the root. `Not` and
  // `Env` occupy a step (always 1) even though specifications skip them.
  using Path = std::vector<std::size_t>;

  // Dot-terminated sequence of 1-based operand indexes ("", "1.", "2.1.").
  class Spec {
  public:
    Spec() = default;

    static Spec parse(std::string_view text) {
      std::size_t i = 0;
      while (i < text.size()) {
        std::size_t j = i;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') j++;
        if (j == i || j >= text.size() || text[j] != '.' || text[i] == '0')
          throw Error("malformed specification '" + std::string(text) + "'");
        i = j + 1;
      }
      Spec s;
      s.text_ = std::string(text);
      return s;
    }

    static Spec of(const std::vector<std::size_t>& components) {
      Spec s;
      for (auto c: components) s.text_ += std::to_string(c) + ".";
      return s;
    }

    const std::string& str() const noexcept { return text_; }
    bool empty() const noexcept { return text_.empty(); }

    std::vector<std::size_t> components() const {
      std::vector<std::size_t> res;
      std::size_t cur = 0;
      for (char c: text_) {
        if (c == '.') { res.push_back(cur); cur = 0; }
        else cur = cur * 10 + static_cast<std::size_t>(c - '0');
      }
      return res;
    }

    Spec child(std::size_t i) const {
      Spec s = *this;
      s.text_ += std::to_string(i) + ".";
      return s;
    }
    bool has_prefix(const Spec& p) const noexcept { return text_.starts_with(p.text_); }
    Spec strip(const Spec& p) const {
      if (!has_prefix(p)) throw Error("'" + p.text_ + "' is not a prefix of '" + text_ + "'");
      Spec s;
      s.text_ = text_.substr(p.text_.size());
      return s;
    }
    friend Spec operator+(const Spec& a, const Spec& b) {
      Spec s = a;
      s.text_ += b.text_;
      return s;
    }

    friend bool operator==(const Spec&, const Spec&) = default;
    friend auto operator<=>(const Spec&, const Spec&) = default;

  private:
    std::string text_;
  };

  // ---------------------------------------------------------------------------
  // Navigation

  inline const Formula& at(const Formula& f, const Path& path) {
    const Formula* cur = &f;
    for (auto i: path) {
      if (i == 0 || i > cur->arity()) throw Error("invalid path");
      cur = &cur->operand(i);
    }
    return *cur;
  }

  inline Formula substitute_at(const Formula& f, const Path& path, const Formula& g, std::size_t depth = 0) {
    if (depth == path.size()) return g;
    auto i = path[depth];
    if (i == 0 || i > f.arity()) throw Error("invalid path");
    auto kids = f.kids();
    kids[i - 1] = substitute_at(kids[i - 1], path, g, depth + 1);
    return f.with_kids(std::move(kids));
  }

  inline Polarity polarity(const Formula& f, const Path& path) {
    const Formula* cur = &f;
    Polarity p = Polarity::Positive;
    for (auto i: path) {
      if (i == 0 || i > cur->arity()) throw Error("invalid path");
      if (cur->is(Kind::Not) || (cur->is(Kind::Implies) && i == 1)) p = flip(p);
      cur = &cur->operand(i);
    }
    return p;
  }

  // Agent of the innermost Env node strictly above or at the end of `path`.
  inline std::optional<AgentId> matching_env(const Formula& f, const Path& path) {
    std::optional<AgentId> res;
    const Formula* cur = &f;
    for (auto i: path) {
      if (cur->is(Kind::Env)) res = cur->agent();
      if (i == 0 || i > cur->arity()) throw Error("invalid path");
      cur = &cur->operand(i);
    }
    if (cur->is(Kind::Env)) res = cur->agent();
    return res;
  }

  inline Spec specification(const Formula& f, const Path& path) {
    const Formula* cur = &f;
    Spec s;
    for (auto i: path) {
      if (i == 0 || i > cur->arity()) throw Error("invalid path");
      if (cur->is_choice()) throw Error("path crosses a choice operator");
      if (cur->is_parallel()) s = s.child(i);
      cur = &cur->operand(i);
    }
    return s;
  }

  // Outermost node addressed by `s`; transparent wrappers below it are not entered.
  inline Path resolve_spec(const Formula& f, const Spec& s) {
    Path path;
    const Formula* cur = &f;
    for (auto c: s.components()) {
      while (cur->is_transparent()) {
        path.push_back(1);
        cur = &cur->operand(1);
      }
      if (cur->is_choice()) throw Error("specification '" + s.str() + "' crosses a choice operator");
      if (!cur->is_parallel() || c < 1 || c > cur->arity())
        throw Error("specification '" + s.str() + "' does not address a surface occurrence");
      path.push_back(c);
      cur = &cur->operand(c);
    }
    return path;
  }

  // Extends `path` through Not/Env wrappers to the node they wrap.
  inline Path descend_transparent(const Formula& f, Path path) {
    const Formula* cur = &at(f, path);
    while (cur->is_transparent()) {
      path.push_back(1);
      cur = &cur->operand(1);
    }
    return path;
  }

  // Innermost node a specification addresses (through Not/Env wrappers).
  inline Path resolve_spec_to_atom(const Formula& f, const Spec& s) { return descend_transparent(f, resolve_spec(f, s)); }

  // ---------------------------------------------------------------------------
  // Surface occurrences

  enum class OccurrenceKind { ChoiceOp, GeneralAtom, HybridAtom };

  struct Occurrence {
    Path path;
    Spec spec;
    Polarity polarity;
    std::optional<AgentId> env;
  };

  namespace detail {
    inline void collect_surface(const Formula& f, OccurrenceKind kind, Path& path, const Spec& spec, Polarity pol,
                                const std::optional<AgentId>& env, std::vector<Occurrence>& out) {
      switch (f.kind()) {
        case Kind::Chand: case Kind::Chor:
          if (kind == OccurrenceKind::ChoiceOp) out.push_back({path, spec, pol, env});
          return;
        case Kind::General:
          if (kind == OccurrenceKind::GeneralAtom) out.push_back({path, spec, pol, env});
          return;
        case Kind::Hybrid:
          if (kind == OccurrenceKind::HybridAtom) out.push_back({path, spec, pol, env});
          return;
        case Kind::Not:
          path.push_back(1);
          collect_surface(f.operand(1), kind, path, spec, flip(pol), env, out);
          path.pop_back();
          return;
        case Kind::Env:
          path.push_back(1);
          collect_surface(f.operand(1), kind, path, spec, pol, f.agent(), out);
          path.pop_back();
          return;
        case Kind::And: case Kind::Or: case Kind::Implies:
          for (std::size_t i = 1; i <= f.arity(); i++) {
            path.push_back(i);
            auto p = (f.is(Kind::Implies) && i == 1) ? flip(pol) : pol;
            collect_surface(f.operand(i), kind, path, spec.child(i), p, env, out);
            path.pop_back();
          }
          return;
        default:
          return;
      }
    }
  }

  // In left-to-right (specification) order.
  inline std::vector<Occurrence> surface_occurrences(const Formula& f, OccurrenceKind kind) {
    std::vector<Occurrence> out;
    Path path;
    detail::collect_surface(f, kind, path, Spec{}, Polarity::Positive, std::nullopt, out);
    return out;
  }

  // ---------------------------------------------------------------------------
  // Structural transforms

  inline Formula skeleton(const Formula& f) {
    if (f.is(Kind::Env)) return skeleton(f.operand(1));
    if (f.is_atom()) return f;
    std::vector<Formula> kids;
    kids.reserve(f.arity());
    for (const auto& k: f.kids()) kids.push_back(skeleton(k));
    return f.with_kids(std::move(kids));
  }

  inline bool contains_env(const Formula& f) {
    if (f.is(Kind::Env)) return true;
    return std::any_of(f.kids().begin(), f.kids().end(), [](const Formula& k) { return contains_env(k); });
  }

  inline bool is_elementary(const Formula& f) {
    switch (f.kind()) {
      case Kind::General: case Kind::Hybrid: case Kind::Chand: case Kind::Chor: return false;
      default: break;
    }
    return std::all_of(f.kids().begin(), f.kids().end(), [](const Formula& k) { return is_elementary(k); });
  }

  namespace detail {
    inline Formula elementarize(const Formula& f, Polarity pol) {
      switch (f.kind()) {
        case Kind::Chand: return Formula::top();
        case Kind::Chor: return Formula::bottom();
        case Kind::General: return pol == Polarity::Positive ? Formula::bottom() : Formula::top();
        case Kind::Hybrid: return Formula::elementary(f.elem());
        case Kind::True: case Kind::False: case Kind::Elementary: return f;
        case Kind::Not: return f.with_kids({elementarize(f.operand(1), flip(pol))});
        case Kind::Implies: return f.with_kids({elementarize(f.operand(1), flip(pol)), elementarize(f.operand(2), pol)});
        default: {
          std::vector<Formula> kids;
          for (const auto& k: f.kids()) kids.push_back(elementarize(k, pol));
          return f.with_kids(std::move(kids));
        }
      }
    }
  }

  inline Formula elementarize(const Formula& f) { return detail::elementarize(f, Polarity::Positive); }

  // Names of elementary atoms, including elementary components of hybrids.
  inline void collect_elementary_names(const Formula& f, std::set<std::string>& out) {
    if (f.is(Kind::Elementary)) out.insert(f.name());
    else if (f.is(Kind::Hybrid)) out.insert(f.elem());
    for (const auto& k: f.kids()) collect_elementary_names(k, out);
  }

  inline std::set<std::string> elementary_names(const Formula& f) {
    std::set<std::string> out;
    collect_elementary_names(f, out);
    return out;
  }

  // Choice operators plus general-atom occurrences (hybrids excluded); every
  // rule application strictly decreases it.
  inline std::size_t complexity(const Formula& f) {
    std::size_t n = (f.is_choice() || f.is(Kind::General)) ? 1 : 0;
    for (const auto& k: f.kids()) n += complexity(k);
    return n;
  }

  // True iff no Env node nests inside another.
  inline bool env_switch_free(const Formula& f, bool inside = false) {
    if (f.is(Kind::Env)) {
      if (inside) return false;
      inside = true;
    }
    return std::all_of(f.kids().begin(), f.kids().end(), [inside](const Formula& k) { return env_switch_free(k, inside); });
  }

  // Every choice operator and general atom has exactly one matching environment.
  inline bool is_cl2psi(const Formula& f, bool inside = false) {
    if (f.is(Kind::Env)) {
      if (inside) return false;
      inside = true;
    }
    if ((f.is_choice() || f.is(Kind::General) || f.is(Kind::Hybrid)) && !inside) return false;
    return std::all_of(f.kids().begin(), f.kids().end(), [inside](const Formula& k) { return is_cl2psi(k, inside); });
  }

}

#endif // CLBK_FORMULA_HPP_

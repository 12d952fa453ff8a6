// clbk :: concrete formula syntax
//
//   formula   := annotated
//   annotated := impl [ "@" agent ]
//   impl      := orx [ "->" impl ]
//   orx       := andx { ("\/" | "|") andx }      "|" builds an n-ary choice
//   andx      := unary { ("/\" | "&") unary }     "&" builds an n-ary choice
//   unary     := "~" unary | "(" formula ")" | atom
//   atom      := lower | upper [ "_" lower ] [ "{" ("h"|"s") "=" ident "}" ] | "T" | "F"
//
// Mixing `&` with `/\` (or `|` with `\/`) at one level needs parentheses.

#ifndef CLBK_SYNTAX_HPP_
#define CLBK_SYNTAX_HPP_

#include <cctype>
#include <string>
#include <string_view>
#include <vector>
#include "formula.hpp"

namespace clbk {

  namespace detail {

    class FormulaParser {
    public:
      explicit FormulaParser(std::string_view src): src_(src) {}

      Formula parse_all() {
        Formula f = annotated();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return f;
      }

    private:
      std::string_view src_;
      std::size_t pos_ = 0;

      [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

      [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); i++) {
          if (src_[i] == '\n') { line++; col = 1; }
          else col++;
        }
        throw ParseError(msg, line, col);
      }

      void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) pos_++;
      }

      bool peek(std::string_view tok) {
        skip_ws();
        return src_.substr(pos_).starts_with(tok);
      }

      bool accept(std::string_view tok) {
        if (!peek(tok)) return false;
        pos_ += tok.size();
        return true;
      }

      void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
      }

      static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

      std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '_')) pos_++;
        if (start == pos_) fail("expected identifier");
        return std::string(src_.substr(start, pos_ - start));
      }

      Formula annotated() {
        std::size_t start = (skip_ws(), pos_);
        Formula body = impl();
        if (!accept("@")) return body;
        AgentId agent = agent_id();
        if (contains_env(body)) fail_at(start, "env-switching annotation: '" + agent + "' wraps an annotated subformula");
        return Formula::env(std::move(body), std::move(agent));
      }

      AgentId agent_id() {
        skip_ws();
        if (accept("\"")) {
          std::size_t start = pos_;
          while (pos_ < src_.size() && src_[pos_] != '"') pos_++;
          if (pos_ >= src_.size()) fail("unterminated agent id");
          std::string id(src_.substr(start, pos_ - start));
          pos_++;
          if (!valid_agent_id(id)) fail_at(start, "invalid agent id");
          return id;
        }
        std::size_t start = pos_;
        while (pos_ < src_.size()) {
          char c = src_[pos_];
          if (ident_char(c) || c == '_' || c == '*' || c == '.' || c == ':' || c == '/' || c == '-' || c == '+') pos_++;
          else break;
        }
        if (start == pos_) fail("expected agent id");
        return std::string(src_.substr(start, pos_ - start));
      }

      Formula impl() {
        Formula lhs = orx();
        if (!accept("->")) return lhs;
        return Formula::implies(std::move(lhs), impl());
      }

      // Shared by orx/andx: `par` is the binary parallel token, `cho` the n-ary choice token.
      template <typename Next>
      Formula nary(std::string_view par, std::string_view cho, Kind par_kind, Kind cho_kind, Next next) {
        Formula first = (this->*next)();
        std::vector<Formula> items{first};
        std::optional<bool> choice;
        while (true) {
          std::size_t at = (skip_ws(), pos_);
          bool is_par = peek(par), is_cho = !is_par && peek(cho);
          if (!is_par && !is_cho) break;
          if (choice && *choice != is_cho)
            fail_at(at, "mixing '" + std::string(par) + "' and '" + std::string(cho) + "' requires parentheses");
          choice = is_cho;
          pos_ += is_cho ? cho.size() : par.size();
          items.push_back((this->*next)());
        }
        if (items.size() == 1) return first;
        if (*choice) return cho_kind == Kind::Chand ? Formula::chand(std::move(items)) : Formula::chor(std::move(items));
        Formula acc = items[0];
        for (std::size_t i = 1; i < items.size(); i++)
          acc = par_kind == Kind::And ? Formula::conj(acc, items[i]) : Formula::disj(acc, items[i]);
        return acc;
      }

      Formula orx() { return nary("\\/", "|", Kind::Or, Kind::Chor, &FormulaParser::andx); }
      Formula andx() { return nary("/\\", "&", Kind::And, Kind::Chand, &FormulaParser::unary); }

      Formula unary() {
        if (accept("~")) return Formula::negation(unary());
        if (accept("(")) {
          Formula f = annotated();
          expect(")");
          return f;
        }
        return atom();
      }

      Formula atom() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
        while (pos_ < src_.size() && ident_char(src_[pos_])) pos_++;
        std::string name(src_.substr(start, pos_ - start));
        bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        std::string elem;
        if (upper && pos_ < src_.size() && src_[pos_] == '_') {
          pos_++;
          std::size_t es = pos_;
          while (pos_ < src_.size() && ident_char(src_[pos_])) pos_++;
          elem = std::string(src_.substr(es, pos_ - es));
          if (elem.empty() || !std::islower(static_cast<unsigned char>(elem[0])))
            fail_at(es, "hybrid atom needs a lowercase elementary component");
        }
        Annotation ann;
        if (pos_ < src_.size() && src_[pos_] == '{') {
          std::size_t as = pos_;
          pos_++;
          skip_ws();
          if (accept("h")) ann.kind = AnnotationKind::Heuristic;
          else if (accept("s")) ann.kind = AnnotationKind::Script;
          else fail("expected 'h' or 's' in annotation");
          expect("=");
          ann.name = ident();
          expect("}");
          if (!upper) fail_at(as, "annotation on elementary atom '" + name + "'");
        }
        if (!upper) {
          for (char ch: name)
            if (std::isupper(static_cast<unsigned char>(ch))) fail_at(start, "elementary atom names are lowercase");
          return Formula::elementary(std::move(name));
        }
        if (elem.empty() && ann.empty()) {
          if (name == "T") return Formula::top();
          if (name == "F") return Formula::bottom();
        }
        if (name == "T" || name == "F") fail_at(start, "'" + name + "' is reserved for truth constants");
        if (!elem.empty()) return Formula::hybrid(std::move(name), std::move(elem), std::move(ann));
        return Formula::general(std::move(name), std::move(ann));
      }
    };

    // Binding strength: Env 0, -> 1, \/ | 2, /\ & 3, ~ and atoms 4.
    // Compound operands of -> are always parenthesized.
    inline int level(const Formula& f) {
      switch (f.kind()) {
        case Kind::Env: return 0;
        case Kind::Implies: return 1;
        case Kind::Or: case Kind::Chor: return 2;
        case Kind::And: case Kind::Chand: return 3;
        default: return 4;
      }
    }

    inline bool bare_agent(const AgentId& id) {
      if (id.empty() || !(std::isalpha(static_cast<unsigned char>(id[0])) || id[0] == '_')) return false;
      return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    }

    void print(const Formula& f, std::string& out);

    inline void print_wrapped(const Formula& f, bool parens, std::string& out) {
      if (parens) out += '(';
      print(f, out);
      if (parens) out += ')';
    }

    inline void print_annotation(const Annotation& a, std::string& out) {
      if (a.empty()) return;
      out += a.kind == AnnotationKind::Heuristic ? "{h=" : "{s=";
      out += a.name;
      out += '}';
    }

    inline void print(const Formula& f, std::string& out) {
      switch (f.kind()) {
        case Kind::True: out += 'T'; return;
        case Kind::False: out += 'F'; return;
        case Kind::Elementary: out += f.name(); return;
        case Kind::General: out += f.name(); print_annotation(f.annotation(), out); return;
        case Kind::Hybrid: out += f.name() + "_" + f.elem(); print_annotation(f.annotation(), out); return;
        case Kind::Not:
          out += '~';
          print_wrapped(f.operand(1), level(f.operand(1)) < 4, out);
          return;
        case Kind::Env: {
          const Formula& body = f.operand(1);
          print_wrapped(body, body.is_choice() || level(body) < 1, out);
          out += " @ ";
          out += bare_agent(f.agent()) ? f.agent() : "\"" + f.agent() + "\"";
          return;
        }
        case Kind::Implies:
          print_wrapped(f.operand(1), level(f.operand(1)) < 4, out);
          out += " -> ";
          print_wrapped(f.operand(2), level(f.operand(2)) < 4, out);
          return;
        case Kind::And: case Kind::Or: {
          int l = level(f);
          const Formula& a = f.operand(1);
          print_wrapped(a, level(a) < l || (level(a) == l && a.kind() != f.kind()), out);
          out += f.is(Kind::And) ? " /\\ " : " \\/ ";
          print_wrapped(f.operand(2), level(f.operand(2)) <= l, out);
          return;
        }
        case Kind::Chand: case Kind::Chor: {
          int l = level(f);
          for (std::size_t i = 1; i <= f.arity(); i++) {
            if (i > 1) out += f.is(Kind::Chand) ? " & " : " | ";
            print_wrapped(f.operand(i), level(f.operand(i)) <= l, out);
          }
          return;
        }
      }
    }

  }

  inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse_all(); }

  inline std::string print_formula(const Formula& f) {
    std::string out;
    detail::print(f, out);
    return out;
  }

}

#endif // CLBK_SYNTAX_HPP_

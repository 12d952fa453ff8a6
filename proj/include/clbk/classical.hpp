// clbk :: classical propositional validity
//
// Validity of an elementary formula is decided as unsatisfiability of its
// negation: Tseitin clauses plus a DPLL search with unit propagation. The
// formulas seen by the stability test reach a few dozen atoms, where plain
// truth tables stop being practical.

#ifndef CLBK_CLASSICAL_HPP_
#define CLBK_CLASSICAL_HPP_

#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>
#include "formula.hpp"

namespace clbk {

  using Valuation = std::map<std::string, bool>;

  // Env annotations are transparent; throws on non-elementary input.
  inline bool evaluate(const Formula& f, const Valuation& v) {
    switch (f.kind()) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Elementary: {
        auto it = v.find(f.name());
        if (it == v.end()) throw Error("valuation misses atom '" + f.name() + "'");
        return it->second;
      }
      case Kind::Not: return !evaluate(f.operand(1), v);
      case Kind::And: return evaluate(f.operand(1), v) && evaluate(f.operand(2), v);
      case Kind::Or: return evaluate(f.operand(1), v) || evaluate(f.operand(2), v);
      case Kind::Implies: return !evaluate(f.operand(1), v) || evaluate(f.operand(2), v);
      case Kind::Env: return evaluate(f.operand(1), v);
      default: throw Error("cannot evaluate a non-elementary formula");
    }
  }

  namespace detail {

    // Literals are +v / -v for variables v >= 1.
    class Cnf {
    public:
      std::vector<std::vector<int>> clauses;
      int vars = 0;

      int encode(const Formula& f) {
        switch (f.kind()) {
          case Kind::True: return constant(true);
          case Kind::False: return constant(false);
          case Kind::Elementary: {
            auto [it, fresh] = atoms_.try_emplace(f.name(), 0);
            if (fresh) it->second = ++vars;
            return it->second;
          }
          case Kind::Env: return encode(f.operand(1));
          case Kind::Not: return -encode(f.operand(1));
          case Kind::And: return gate(encode(f.operand(1)), encode(f.operand(2)));
          case Kind::Or: return -gate(-encode(f.operand(1)), -encode(f.operand(2)));
          case Kind::Implies: return -gate(encode(f.operand(1)), -encode(f.operand(2)));
          default: throw Error("classical validity needs an elementary formula");
        }
      }

    private:
      std::map<std::string, int> atoms_;
      int true_var_ = 0;

      int constant(bool value) {
        if (true_var_ == 0) {
          true_var_ = ++vars;
          clauses.push_back({true_var_});
        }
        return value ? true_var_ : -true_var_;
      }

      // g <-> a /\ b
      int gate(int a, int b) {
        int g = ++vars;
        clauses.push_back({-g, a});
        clauses.push_back({-g, b});
        clauses.push_back({g, -a, -b});
        return g;
      }
    };

    class Dpll {
    public:
      explicit Dpll(const Cnf& cnf): cnf_(cnf), value_(static_cast<std::size_t>(cnf.vars) + 1, 0) {}

      bool solve() {
        if (!propagate()) return false;
        int v = pick();
        if (v == 0) return true;
        for (int lit: {v, -v}) {
          auto saved = value_;
          assign(lit);
          if (solve()) return true;
          value_ = std::move(saved);
        }
        return false;
      }

    private:
      const Cnf& cnf_;
      std::vector<std::int8_t> value_;  // 0 unassigned, 1 true, -1 false

      int lit_value(int lit) const {
        int v = value_[static_cast<std::size_t>(std::abs(lit))];
        return lit > 0 ? v : -v;
      }
      void assign(int lit) { value_[static_cast<std::size_t>(std::abs(lit))] = lit > 0 ? 1 : -1; }

      bool propagate() {
        bool changed = true;
        while (changed) {
          changed = false;
          for (const auto& c: cnf_.clauses) {
            int unassigned = 0, last = 0;
            bool sat = false;
            for (int lit: c) {
              int lv = lit_value(lit);
              if (lv > 0) { sat = true; break; }
              if (lv == 0) { unassigned++; last = lit; }
            }
            if (sat) continue;
            if (unassigned == 0) return false;
            if (unassigned == 1) {
              assign(last);
              changed = true;
            }
          }
        }
        return true;
      }

      int pick() const {
        for (int v = 1; v <= cnf_.vars; v++)
          if (value_[static_cast<std::size_t>(v)] == 0) return v;
        return 0;
      }
    };

  }

  inline bool satisfiable(const Formula& f) {
    detail::Cnf cnf;
    int root = cnf.encode(f);
    cnf.clauses.push_back({root});
    return detail::Dpll(cnf).solve();
  }

  inline bool is_valid(const Formula& f) {
    if (!is_elementary(f)) throw Error("classical validity needs an elementary formula");
    return !satisfiable(Formula::negation(f));
  }

}

#endif // CLBK_CLASSICAL_HPP_

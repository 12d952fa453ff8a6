// clbk :: Prover
//
// Three-rule proof system over choice operators and general atoms:
//   A  the conclusion is stable, and every environment choice (positive &,
//      negative |) has one premise per branch;
//   B  the machine resolves one of its own choices (negative &, positive |);
//   C  a positive and a negative occurrence of the same general atom are
//      replaced by a fresh elementary atom (search form) or by the hybrid
//      atom P_q (execution form, produced by `hybridize`).
// Search is depth-first with a fixed rule order and memoized failures.

#ifndef CLBK_PROVER_HPP_
#define CLBK_PROVER_HPP_

#include <atomic>
#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>
#include "classical.hpp"
#include "formula.hpp"
#include "syntax.hpp"

namespace clbk {

  struct RuleA {
    friend bool operator==(const RuleA&, const RuleA&) = default;
  };

  struct RuleB {
    Spec spec;
    std::size_t branch = 1;
    std::optional<AgentId> env;
    friend bool operator==(const RuleB&, const RuleB&) = default;
  };

  struct RuleC {
    Spec pos_spec;
    Spec neg_spec;
    std::string atom;  // the fresh elementary atom, or the hybrid's elementary component
    friend bool operator==(const RuleC&, const RuleC&) = default;
  };

  using RuleTag = std::variant<RuleA, RuleB, RuleC>;

  inline char rule_letter(const RuleTag& r) { return "ABC"[r.index()]; }

  struct ChoiceKey {
    Spec spec;
    std::size_t branch;
    friend bool operator==(const ChoiceKey&, const ChoiceKey&) = default;
  };

  struct ProofTree {
    Formula conclusion;
    RuleTag rule;
    std::vector<ProofTree> premises;
    std::vector<ChoiceKey> index;  // rule A only: index[i] is the choice answered by premises[i]

    std::size_t size() const {
      std::size_t n = 1;
      for (const auto& p: premises) n += p.size();
      return n;
    }

    const ProofTree* premise_for(const Spec& spec, std::size_t branch) const {
      for (std::size_t i = 0; i < index.size(); i++)
        if (index[i].spec == spec && index[i].branch == branch) return &premises[i];
      return nullptr;
    }
  };

  struct ChoicePremise {
    Spec spec;
    std::size_t branch;
    std::optional<AgentId> env;
    Formula formula;
  };

  struct PairPremise {
    Spec pos_spec;
    Spec neg_spec;
    Formula formula;
  };

  // Count of rule applications whose premise failed to lower `complexity`.
  inline std::atomic<long> measure_violations{0};

  inline bool is_stable(const Formula& f) { return is_valid(elementarize(f)); }

  namespace detail {

    // Branch `g` placed at an occurrence; wrapped in its matching environment
    // unless an enclosing annotation already supplies it.
    inline Formula place_branch(const Formula& f, const Occurrence& occ, const Formula& g) {
      bool enclosed = false;
      const Formula* cur = &f;
      for (auto i: occ.path) {
        if (cur->is(Kind::Env)) enclosed = true;
        cur = &cur->operand(i);
      }
      if (enclosed || !occ.env || g.is(Kind::Env)) return substitute_at(f, occ.path, g);
      return substitute_at(f, occ.path, Formula::env(g, *occ.env));
    }

    inline std::vector<ChoicePremise> choice_premises(const Formula& f, bool env_choices) {
      std::vector<ChoicePremise> out;
      for (const auto& occ: surface_occurrences(f, OccurrenceKind::ChoiceOp)) {
        const Formula& node = at(f, occ.path);
        bool pos = occ.polarity == Polarity::Positive;
        bool env_choice = (node.is(Kind::Chand) && pos) || (node.is(Kind::Chor) && !pos);
        if (env_choice != env_choices) continue;
        for (std::size_t i = 1; i <= node.arity(); i++)
          out.push_back({occ.spec, i, occ.env, place_branch(f, occ, node.operand(i))});
      }
      return out;
    }

    inline std::string fresh_atom(const std::set<std::string>& taken) {
      static const std::string order = "pqrstuvwxyzabcdefghijklmno";
      for (std::size_t round = 0;; round++) {
        for (char c: order) {
          std::string n(1, c);
          if (round > 0) n += std::to_string(round);
          if (!taken.contains(n)) return n;
        }
      }
    }

    inline std::vector<std::pair<Occurrence, Occurrence>> general_pairs(const Formula& f) {
      std::vector<std::pair<Occurrence, Occurrence>> out;
      auto occs = surface_occurrences(f, OccurrenceKind::GeneralAtom);
      for (const auto& p: occs) {
        if (p.polarity != Polarity::Positive) continue;
        const std::string& name = at(f, p.path).name();
        for (const auto& n: occs)
          if (n.polarity == Polarity::Negative && at(f, n.path).name() == name) out.emplace_back(p, n);
      }
      return out;
    }

    inline Formula pair_premise(const Formula& f, const Occurrence& pos, const Occurrence& neg, const std::string& atom) {
      Formula q = Formula::elementary(atom);
      return substitute_at(substitute_at(f, pos.path, q), neg.path, q);
    }

  }

  // Environment choices, one entry per (occurrence, branch).
  inline std::vector<ChoicePremise> premises_A(const Formula& f) { return detail::choice_premises(f, true); }

  // Machine choices, one entry per (occurrence, branch).
  inline std::vector<ChoicePremise> premises_B(const Formula& f) { return detail::choice_premises(f, false); }

  // Ordered by positive occurrence, then negative occurrence. Fresh atoms
  // avoid every elementary name in `f` and in `reserved`.
  inline std::vector<PairPremise> premises_C(const Formula& f, const std::set<std::string>& reserved = {}) {
    std::set<std::string> taken = elementary_names(f);
    taken.insert(reserved.begin(), reserved.end());
    std::string atom = detail::fresh_atom(taken);
    std::vector<PairPremise> out;
    for (const auto& [p, n]: detail::general_pairs(f)) out.push_back({p.spec, n.spec, detail::pair_premise(f, p, n, atom)});
    return out;
  }

  namespace detail {

    class Search {
    public:
      explicit Search(const Formula& root): reserved_(elementary_names(root)) {}

      std::optional<ProofTree> prove(const Formula& f) {
        std::string key = memo_key(f);
        if (failed_.contains(key)) return std::nullopt;
        auto res = attempt(f);
        if (!res) failed_.insert(std::move(key));
        return res;
      }

    private:
      std::set<std::string> reserved_;
      std::unordered_set<std::string> failed_;

      static void check_measure(const Formula& premise, std::size_t bound) {
        if (complexity(premise) >= bound) {
          measure_violations++;
          assert(false && "rule application did not decrease the measure");
        }
      }

      std::optional<ProofTree> attempt(const Formula& f) {
        std::size_t measure = complexity(f);

        // C: pair general atoms while any pairing remains
        {
          std::set<std::string> taken = elementary_names(f);
          taken.insert(reserved_.begin(), reserved_.end());
          std::string atom = fresh_atom(taken);
          for (const auto& [p, n]: general_pairs(f)) {
            Formula premise = pair_premise(f, p, n, atom);
            check_measure(premise, measure);
            if (auto sub = prove(premise))
              return ProofTree{f, RuleC{p.spec, n.spec, atom}, {std::move(*sub)}, {}};
          }
        }

        // A
        if (is_stable(f)) {
          ProofTree node{f, RuleA{}, {}, {}};
          bool ok = true;
          for (auto& prem: premises_A(f)) {
            check_measure(prem.formula, measure);
            auto sub = prove(prem.formula);
            if (!sub) { ok = false; break; }
            node.premises.push_back(std::move(*sub));
            node.index.push_back({prem.spec, prem.branch});
          }
          if (ok) return node;
        }

        // B
        for (auto& prem: premises_B(f)) {
          check_measure(prem.formula, measure);
          if (auto sub = prove(prem.formula))
            return ProofTree{f, RuleB{prem.spec, prem.branch, prem.env}, {std::move(*sub)}, {}};
        }
        return std::nullopt;
      }

      // Structure without agents or annotations; search-introduced atoms are
      // renamed by first appearance so that pairing order does not matter.
      std::string memo_key(const Formula& f) const {
        std::string out;
        std::map<std::string, std::size_t> rename;
        auto walk = [&](auto& self, const Formula& g) -> void {
          switch (g.kind()) {
            case Kind::Env: self(self, g.operand(1)); return;
            case Kind::Elementary:
              if (reserved_.contains(g.name())) out += g.name();
              else out += "#" + std::to_string(rename.try_emplace(g.name(), rename.size()).first->second);
              out += ' ';
              return;
            case Kind::General: out += g.name() + ' '; return;
            case Kind::Hybrid: out += g.name() + "_" + g.elem() + ' '; return;
            default:
              out += std::to_string(static_cast<int>(g.kind())) + '(';
              for (const auto& k: g.kids()) self(self, k);
              out += ')';
          }
        };
        walk(walk, f);
        return out;
      }
    };

  }

  inline std::optional<ProofTree> prove(const Formula& f) { return detail::Search(f).prove(f); }

  namespace detail {

    inline Formula hybridize_formula(const Formula& f, const std::map<std::string, std::string>& generals,
                                     const std::map<std::pair<std::string, std::string>, Annotation>& anns, const Spec& spec) {
      if (f.is(Kind::Elementary)) {
        auto it = generals.find(f.name());
        if (it == generals.end()) return f;
        auto a = anns.find({f.name(), spec.str()});
        return Formula::hybrid(it->second, f.name(), a == anns.end() ? Annotation{} : a->second);
      }
      if (f.is_atom()) return f;
      std::vector<Formula> kids;
      for (std::size_t i = 1; i <= f.arity(); i++)
        kids.push_back(hybridize_formula(f.operand(i), generals, anns, f.is_parallel() ? spec.child(i) : spec));
      return f.with_kids(std::move(kids));
    }

    inline ProofTree hybridize(const ProofTree& t, std::map<std::string, std::string> generals,
                               std::map<std::pair<std::string, std::string>, Annotation> anns) {
      if (auto* c = std::get_if<RuleC>(&t.rule)) {
        const Formula& pos = at(t.conclusion, resolve_spec_to_atom(t.conclusion, c->pos_spec));
        const Formula& neg = at(t.conclusion, resolve_spec_to_atom(t.conclusion, c->neg_spec));
        generals[c->atom] = pos.name();
        anns[{c->atom, c->pos_spec.str()}] = pos.annotation();
        anns[{c->atom, c->neg_spec.str()}] = neg.annotation();
      }
      ProofTree out{hybridize_formula(t.conclusion, generals, anns, Spec{}), t.rule, {}, t.index};
      for (const auto& p: t.premises) out.premises.push_back(hybridize(p, generals, anns));
      return out;
    }

  }

  // Replaces each fresh atom q introduced by a C step with P_q in that premise
  // and all of its descendants; the annotations of the two paired occurrences
  // are kept on their hybrid counterparts.
  inline ProofTree hybridize(const ProofTree& t) { return detail::hybridize(t, {}, {}); }

  namespace detail {

    inline bool verify_c(const ProofTree& t, const RuleC& c) {
      const Formula& f = t.conclusion;
      Path pp, np;
      try {
        pp = resolve_spec_to_atom(f, c.pos_spec);
        np = resolve_spec_to_atom(f, c.neg_spec);
      } catch (const Error&) {
        return false;
      }
      const Formula& pos = at(f, pp);
      const Formula& neg = at(f, np);
      if (!pos.is(Kind::General) || !neg.is(Kind::General) || pos.name() != neg.name()) return false;
      if (polarity(f, pp) != Polarity::Positive || polarity(f, np) != Polarity::Negative) return false;
      if (elementary_names(f).contains(c.atom) || c.atom.empty()) return false;
      const Formula& prem = t.premises[0].conclusion;
      Formula q = Formula::elementary(c.atom);
      if (prem == substitute_at(substitute_at(f, pp, q), np, q)) return true;
      Formula hp = Formula::hybrid(pos.name(), c.atom, pos.annotation());
      Formula hn = Formula::hybrid(neg.name(), c.atom, neg.annotation());
      return prem == substitute_at(substitute_at(f, pp, hp), np, hn);
    }

  }

  inline bool verify_proof(const ProofTree& t) {
    const Formula& f = t.conclusion;
    bool ok = std::visit([&](const auto& r) -> bool {
      using R = std::decay_t<decltype(r)>;
      if constexpr (std::is_same_v<R, RuleA>) {
        if (!is_stable(f)) return false;
        auto required = premises_A(f);
        if (required.size() != t.premises.size() || t.index.size() != t.premises.size()) return false;
        for (std::size_t i = 0; i < required.size(); i++) {
          if (!(t.index[i] == ChoiceKey{required[i].spec, required[i].branch})) return false;
          if (!(t.premises[i].conclusion == required[i].formula)) return false;
        }
        return true;
      } else if constexpr (std::is_same_v<R, RuleB>) {
        if (t.premises.size() != 1) return false;
        for (auto& prem: premises_B(f))
          if (prem.spec == r.spec && prem.branch == r.branch)
            return prem.env == r.env && prem.formula == t.premises[0].conclusion;
        return false;
      } else {
        return t.premises.size() == 1 && detail::verify_c(t, r);
      }
    }, t.rule);
    if (!ok) return false;
    for (const auto& p: t.premises)
      if (complexity(p.conclusion) >= complexity(f) || !verify_proof(p)) return false;
    return true;
  }

  // One line per node, premises first:
  //   `<id> <formula> rule <A|B|C> <premise ids, comma separated, or 0>`
  inline std::string proof_listing(const ProofTree& t) {
    std::string out;
    std::size_t next = 1;
    auto emit = [&](auto& self, const ProofTree& n) -> std::size_t {
      std::vector<std::size_t> ids;
      for (const auto& p: n.premises) ids.push_back(self(self, p));
      std::size_t id = next++;
      out += std::to_string(id) + " " + print_formula(n.conclusion) + " rule " + rule_letter(n.rule) + " ";
      if (ids.empty()) out += "0";
      for (std::size_t i = 0; i < ids.size(); i++) out += (i ? "," : "") + std::to_string(ids[i]);
      out += "\n";
      return id;
    };
    emit(emit, t);
    return out;
  }

}

#endif // CLBK_PROVER_HPP_

// clbk :: Execution of hybridized proofs
//
// A Session walks a proof tree from the root. B and C nodes are handled by
// the machine alone (choice moves, copy-cat replays); at an A node the session
// waits for environment moves, which either feed a general atom, are mirrored
// across a hybrid pair, or resolve an environment choice and move the session
// to the matching premise.

#ifndef CLBK_ENGINE_HPP_
#define CLBK_ENGINE_HPP_

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>
#include "formula.hpp"
#include "prover.hpp"

namespace clbk {

  enum class Player { Machine, Environment };

  inline Player opponent(Player p) { return p == Player::Machine ? Player::Environment : Player::Machine; }
  inline char label(Player p) { return p == Player::Machine ? 'T' : 'B'; }

  // A bare integer selects a branch; anything else is an atom-level move.
  inline bool is_choice_payload(std::string_view m) {
    return !m.empty() && std::all_of(m.begin(), m.end(), [](char c) { return c >= '0' && c <= '9'; });
  }

  inline bool is_atom_payload(std::string_view m) {
    if (m.empty() || m[0] < 'a' || m[0] > 'z') return false;
    return std::all_of(m.begin(), m.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '='; });
  }

  struct Labmove {
    Player player = Player::Environment;
    Spec spec;
    std::string payload;

    std::string move() const { return spec.str() + payload; }
    std::string str() const { return label(player) + move(); }
    friend bool operator==(const Labmove&, const Labmove&) = default;
  };

  using Run = std::vector<Labmove>;

  // "2.1.x=3" -> (2.1., x=3); "2.1" -> (2., 1); "1" -> (root, 1)
  inline std::pair<Spec, std::string> parse_move(std::string_view text) {
    std::vector<std::size_t> comps;
    std::size_t i = 0;
    while (true) {
      std::size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') j++;
      if (j == i || j >= text.size() || text[j] != '.') break;
      comps.push_back(std::stoul(std::string(text.substr(i, j - i))));
      i = j + 1;
    }
    std::string payload(text.substr(i));
    if (!is_choice_payload(payload) && !is_atom_payload(payload)) throw Error("malformed move '" + std::string(text) + "'");
    return {Spec::of(comps), payload};
  }

  inline Run subrun(const Run& omega, const Spec& spec) {
    Run out;
    for (const auto& lm: omega)
      if (lm.spec.has_prefix(spec)) out.push_back({lm.player, lm.spec.strip(spec), lm.payload});
    return out;
  }

  inline Run flipped(Run r) {
    for (auto& lm: r) lm.player = opponent(lm.player);
    return r;
  }

  // Atom-level subrun as seen from the atom's own game: labels flipped at
  // negative occurrences, branch selections removed.
  inline Run game_run(const Run& omega, const Spec& spec, Polarity pol) {
    Run out;
    for (auto& lm: subrun(omega, spec))
      if (!is_choice_payload(lm.payload)) out.push_back(lm);
    return pol == Polarity::Negative ? flipped(std::move(out)) : out;
  }

  class GameDef {
  public:
    virtual ~GameDef() = default;
    virtual std::string name() const = 0;
    virtual bool legal(const Run& run, Player who, const std::string& payload) const = 0;
    virtual Player winner(const Run& run) const = 0;
    virtual bool complete(const Run& run) const = 0;
  };

  using Heuristic = std::function<std::optional<std::string>(const Run&)>;
  using Script = std::vector<std::string>;

  struct Bindings {
    std::map<std::string, std::shared_ptr<const GameDef>> games;  // by general atom name
    std::map<std::string, Heuristic> heuristics;
    std::map<std::string, Script> scripts;
    std::map<std::string, bool> interpretation;  // elementary atoms, false when absent
  };

  enum class Status { Running, Quiescent, Finished };

  // The innermost Env node on the way to `s`: its spec and agent.
  inline std::optional<std::pair<Spec, AgentId>> enclosing_env(const Formula& f, const Spec& s) {
    std::optional<std::pair<Spec, AgentId>> found;
    const Formula* cur = &f;
    const auto& comps = s.components();
    std::size_t k = 0;
    while (true) {
      if (cur->is(Kind::Env)) {
        found = {Spec::of(std::vector<std::size_t>(comps.begin(), comps.begin() + static_cast<std::ptrdiff_t>(k))), cur->agent()};
        cur = &cur->operand(1);
      } else if (cur->is(Kind::Not)) {
        cur = &cur->operand(1);
      } else if (cur->is_parallel() && k < comps.size() && comps[k] >= 1 && comps[k] <= 2) {
        cur = &cur->operand(comps[k++]);
      } else {
        return found;
      }
    }
  }

  class Session {
  public:
    Session(std::shared_ptr<const ProofTree> tree, Bindings bindings, AgentId owner, Run initial = {})
      : tree_(std::move(tree)), node_(tree_.get()), bindings_(std::move(bindings)), owner_(std::move(owner)), omega_(std::move(initial)) {
      for (auto kind: {OccurrenceKind::GeneralAtom, OccurrenceKind::HybridAtom})
        for (const auto& occ: surface_occurrences(E(), kind)) {
          const std::string& name = at(E(), occ.path).name();
          if (!bindings_.games.contains(name)) throw Error("no game bound to general atom '" + name + "'");
        }
    }

    const Formula& E() const { return node_->conclusion; }
    const ProofTree& node() const { return *node_; }
    const Run& position() const { return omega_; }
    const AgentId& owner() const { return owner_; }
    Status status() const { return status_; }
    std::optional<Player> winner() const { return winner_; }
    const Bindings& bindings() const { return bindings_; }

    // Agents named by env annotations of the root formula.
    std::set<AgentId> activated() const {
      std::set<AgentId> out;
      auto walk = [&](auto& self, const Formula& f) -> void {
        if (f.is(Kind::Env)) out.insert(f.agent());
        for (const auto& k: f.kids()) self(self, k);
      };
      walk(walk, tree_->conclusion);
      return out;
    }

    void deliver(Labmove lm) {
      inbox_.push_back(std::move(lm));
      if (status_ == Status::Quiescent) status_ = Status::Running;
    }
    bool inbox_empty() const { return inbox_.empty(); }

    // Mainloop cases B and C°, until an A node is reached.
    std::vector<Labmove> machine_turn() {
      std::vector<Labmove> out;
      while (true) {
        if (auto* b = std::get_if<RuleB>(&node_->rule)) {
          make({Player::Machine, b->spec, std::to_string(b->branch)}, out);
          node_ = &node_->premises[0];
        } else if (auto* c = std::get_if<RuleC>(&node_->rule)) {
          Run pi = subrun(omega_, c->pos_spec), nu = subrun(omega_, c->neg_spec);
          for (const auto& m: nu)
            if (!is_choice_payload(m.payload)) make({Player::Machine, c->pos_spec + m.spec, m.payload}, out);
          for (const auto& m: pi)
            if (!is_choice_payload(m.payload)) make({Player::Machine, c->neg_spec + m.spec, m.payload}, out);
          node_ = &node_->premises[0];
        } else {
          return out;
        }
      }
    }

    bool at_a_node() const { return std::holds_alternative<RuleA>(node_->rule); }

    // Innerloop subcases; anything that fits none of them is ignored.
    std::vector<Labmove> env_move(const Labmove& lm) {
      std::vector<Labmove> out;
      if (lm.player != Player::Environment || !at_a_node()) return out;
      Path path;
      try {
        path = resolve_spec_to_atom(E(), lm.spec);
      } catch (const Error&) {
        return out;
      }
      const Formula& target = at(E(), path);
      Polarity pol = polarity(E(), path);

      if (is_choice_payload(lm.payload)) {
        bool env_choice = (target.is(Kind::Chand) && pol == Polarity::Positive) || (target.is(Kind::Chor) && pol == Polarity::Negative);
        if (!env_choice) return out;
        const ProofTree* next = node_->premise_for(lm.spec, std::stoul(lm.payload));
        if (!next) return out;
        omega_.push_back(lm);
        node_ = next;
        return machine_turn();
      }

      if (target.is(Kind::General)) {
        if (!legal_env_move(target, lm.spec, pol, lm.payload)) return out;
        omega_.push_back(lm);
        return out;
      }

      if (target.is(Kind::Hybrid)) {
        if (!legal_env_move(target, lm.spec, pol, lm.payload)) return out;
        auto other = partner(path, target.elem());
        if (!other) return out;
        omega_.push_back(lm);
        make({Player::Machine, *other + lm.spec.strip(specification(E(), path)), lm.payload}, out);
        return out;
      }
      return out;
    }

    // Environment sources in fixed order: delivered moves, scripts, then
    // heuristics standing in for the environment at negative occurrences.
    std::optional<Labmove> pump_environment() {
      if (!inbox_.empty()) {
        Labmove lm = inbox_.front();
        inbox_.pop_front();
        return lm;
      }
      if (!at_a_node()) return std::nullopt;
      auto occs = atom_occurrences();
      for (const auto& occ: occs) {
        const Formula& a = at(E(), occ.path);
        if (a.annotation().kind != AnnotationKind::Script) continue;
        auto it = bindings_.scripts.find(a.annotation().name);
        if (it == bindings_.scripts.end()) continue;
        std::size_t& cursor = cursors_[occ.spec.str() + "|" + a.annotation().name];
        if (cursor >= it->second.size()) continue;
        const std::string& m = it->second[cursor];
        if (!legal_env_move(a, occ.spec, occ.polarity, m)) continue;
        cursor++;
        return Labmove{Player::Environment, occ.spec, m};
      }
      for (const auto& occ: occs) {
        const Formula& a = at(E(), occ.path);
        if (a.annotation().kind != AnnotationKind::Heuristic || occ.polarity != Polarity::Negative) continue;
        auto it = bindings_.heuristics.find(a.annotation().name);
        if (it == bindings_.heuristics.end()) continue;
        auto m = it->second(game_run(omega_, occ.spec, occ.polarity));
        if (!m || !legal_env_move(a, occ.spec, occ.polarity, *m)) continue;
        heuristic_specs_.insert(occ.spec.str());
        return Labmove{Player::Environment, occ.spec, *m};
      }
      return std::nullopt;
    }

    struct Step {
      bool progress = false;
      std::vector<Labmove> outgoing;
      std::optional<Labmove> consumed;
    };

    // One unit of work: a machine turn, or one environment move.
    Step step() {
      Step s;
      if (status_ == Status::Finished) return s;
      if (!at_a_node()) {
        s.outgoing = machine_turn();
        s.progress = true;
        return s;
      }
      if (auto lm = pump_environment()) {
        status_ = Status::Running;
        s.consumed = lm;
        s.outgoing = env_move(*lm);
        s.progress = true;
        return s;
      }
      status_ = Status::Quiescent;
      return s;
    }

    // Runs until no source has anything left.
    std::vector<Labmove> run_to_quiescence(std::size_t max_steps = 100000) {
      std::vector<Labmove> out;
      for (std::size_t i = 0; i < max_steps; i++) {
        Step s = step();
        out.insert(out.end(), s.outgoing.begin(), s.outgoing.end());
        if (!s.progress) break;
      }
      return out;
    }

    Player evaluate_winner() const {
      if (status_ == Status::Running) throw Error("winner requested before quiescence");
      return win(E(), Spec{}, false);
    }

    Player finish() {
      if (status_ == Status::Running) status_ = Status::Quiescent;
      winner_ = evaluate_winner();
      status_ = Status::Finished;
      return *winner_;
    }

    // Specs whose environment moves came from a stand-in heuristic.
    const std::set<std::string>& heuristic_specs() const { return heuristic_specs_; }

  private:
    std::shared_ptr<const ProofTree> tree_;
    const ProofTree* node_;
    Bindings bindings_;
    AgentId owner_;
    Run omega_;
    Status status_ = Status::Running;
    std::optional<Player> winner_;
    std::deque<Labmove> inbox_;
    std::map<std::string, std::size_t> cursors_;
    std::set<std::string> heuristic_specs_;

    void make(Labmove lm, std::vector<Labmove>& out) {
      omega_.push_back(lm);
      out.push_back(std::move(lm));
    }

    std::vector<Occurrence> atom_occurrences() const {
      auto occs = surface_occurrences(E(), OccurrenceKind::GeneralAtom);
      auto hs = surface_occurrences(E(), OccurrenceKind::HybridAtom);
      occs.insert(occs.end(), hs.begin(), hs.end());
      std::stable_sort(occs.begin(), occs.end(), [](const Occurrence& a, const Occurrence& b) { return a.spec < b.spec; });
      return occs;
    }

    const GameDef& game_of(const Formula& atom) const { return *bindings_.games.at(atom.name()); }

    bool legal_env_move(const Formula& atom, const Spec& spec, Polarity pol, const std::string& payload) const {
      if (!is_atom_payload(payload)) return false;
      Player who = pol == Polarity::Positive ? Player::Environment : Player::Machine;
      return game_of(atom).legal(game_run(omega_, spec, pol), who, payload);
    }

    std::optional<Spec> partner(const Path& path, const std::string& elem) const {
      for (const auto& occ: surface_occurrences(E(), OccurrenceKind::HybridAtom))
        if (occ.path != path && at(E(), occ.path).elem() == elem) return occ.spec;
      return std::nullopt;
    }

    // Winner of `f` in its own perspective; `flip` tracks label parity.
    Player win(const Formula& f, const Spec& s, bool flip) const {
      switch (f.kind()) {
        case Kind::True: return Player::Machine;
        case Kind::False: return Player::Environment;
        case Kind::Elementary: {
          auto it = bindings_.interpretation.find(f.name());
          return it != bindings_.interpretation.end() && it->second ? Player::Machine : Player::Environment;
        }
        case Kind::General:
        case Kind::Hybrid:
          return game_of(f).winner(game_run(omega_, s, flip ? Polarity::Negative : Polarity::Positive));
        case Kind::Env: return win(f.operand(1), s, flip);
        case Kind::Not: return opponent(win(f.operand(1), s, !flip));
        case Kind::And: {
          bool a = win(f.operand(1), s.child(1), flip) == Player::Machine;
          bool b = win(f.operand(2), s.child(2), flip) == Player::Machine;
          return a && b ? Player::Machine : Player::Environment;
        }
        case Kind::Or: {
          bool a = win(f.operand(1), s.child(1), flip) == Player::Machine;
          bool b = win(f.operand(2), s.child(2), flip) == Player::Machine;
          return a || b ? Player::Machine : Player::Environment;
        }
        case Kind::Implies: {
          bool a = win(f.operand(1), s.child(1), !flip) == Player::Environment;
          bool b = win(f.operand(2), s.child(2), flip) == Player::Machine;
          return a || b ? Player::Machine : Player::Environment;
        }
        case Kind::Chand: return Player::Machine;
        case Kind::Chor: return Player::Environment;
      }
      return Player::Environment;
    }
  };

  inline Session new_session(const ProofTree& t, Bindings bindings, AgentId owner, Run initial = {}) {
    return Session(std::make_shared<const ProofTree>(t), std::move(bindings), std::move(owner), std::move(initial));
  }

  // Hybrid pairs of the current formula: (spec, spec) per elementary component.
  inline std::vector<std::pair<Spec, Spec>> hybrid_pairs(const Formula& f) {
    std::map<std::string, std::vector<Spec>> by_elem;
    for (const auto& occ: surface_occurrences(f, OccurrenceKind::HybridAtom)) by_elem[at(f, occ.path).elem()].push_back(occ.spec);
    std::vector<std::pair<Spec, Spec>> out;
    for (auto& [_, specs]: by_elem)
      if (specs.size() == 2) out.emplace_back(specs[0], specs[1]);
    return out;
  }

}

#endif // CLBK_ENGINE_HPP_

// clbk :: Agents, resource bases and the in-process bus
//
// Each agent serves its query queue one formula at a time by executing a proof
// of  RB_1 /\ ... /\ RB_k -> Q. Moves made inside an env annotation are sent
// to the named agent, where they arrive as environment moves at the mirrored
// occurrence of the counterpart formula. The counterpart is fixed up front by
// a contract: a query annotated with agent H at server S is bound to an entry
// of H's resource base annotated with S and having the same skeleton.

#ifndef CLBK_AGENTS_HPP_
#define CLBK_AGENTS_HPP_

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>
#include "engine.hpp"
#include "games.hpp"
#include "prover.hpp"

namespace clbk {

  enum class AgentKind { Provider, Consumer, Regular };

  inline std::string kind_name(AgentKind k) {
    switch (k) {
      case AgentKind::Provider: return "provider";
      case AgentKind::Consumer: return "consumer";
      default: return "regular";
    }
  }

  struct RbEntry {
    std::size_t uid = 0;
    Formula formula;
    Run run;  // position carried over from earlier sessions, relative to the entry
  };

  using ResourceBase = std::vector<RbEntry>;

  struct Query {
    std::size_t uid = 0;
    Formula formula;
  };

  // Env nodes reachable without crossing a choice: spec relative to `f`, agent.
  inline std::vector<std::pair<Spec, AgentId>> env_nodes(const Formula& f) {
    std::vector<std::pair<Spec, AgentId>> out;
    auto walk = [&](auto& self, const Formula& g, const Spec& s) -> void {
      if (g.is(Kind::Env)) {
        out.emplace_back(s, g.agent());
        return;
      }
      if (g.is(Kind::Not)) self(self, g.operand(1), s);
      if (g.is_parallel())
        for (std::size_t i = 1; i <= 2; i++) self(self, g.operand(i), s.child(i));
    };
    walk(walk, f, Spec{});
    return out;
  }

  // Hybrids turned back into their general atoms, annotations kept.
  inline Formula revert_hybrids(const Formula& f) {
    if (f.is(Kind::Hybrid)) return Formula::general(f.name(), f.annotation());
    if (f.is_atom()) return f;
    std::vector<Formula> kids;
    for (const auto& k: f.kids()) kids.push_back(revert_hybrids(k));
    return f.with_kids(std::move(kids));
  }

  // J = ((RB_1 /\ RB_2) /\ ...) -> Q, or Q alone for an empty RB.
  inline Formula session_formula(const ResourceBase& rb, const Formula& q) {
    if (rb.empty()) return q;
    Formula acc = rb[0].formula;
    for (std::size_t i = 1; i < rb.size(); i++) acc = Formula::conj(acc, rb[i].formula);
    return Formula::implies(acc, q);
  }

  inline Spec query_spec(const ResourceBase& rb) { return rb.empty() ? Spec{} : Spec::parse("2."); }

  inline Spec entry_spec(std::size_t count, std::size_t j) {
    std::vector<std::size_t> comps{1};
    std::size_t ones = j == 0 ? count - 1 : count - 1 - j;
    for (std::size_t i = 0; i < ones; i++) comps.push_back(1);
    if (j > 0) comps.push_back(2);
    return Spec::of(comps);
  }

  struct Contract {
    std::size_t id = 0;
    AgentId server;  // holds the query
    std::size_t query_uid = 0;
    Spec query_env;  // relative to the query
    AgentId holder;  // holds the resource
    std::size_t entry_uid = 0;
    Spec entry_env;  // relative to the entry
  };

  struct Message {
    std::size_t contract = 0;
    Spec rel;
    std::string payload;
  };

  class Bus {
  public:
    void add(const AgentId& id) {
      if (!known_.insert(id).second) throw Error("agent '" + id + "' registered twice");
      order_.push_back(id);
    }
    bool knows(const AgentId& id) const { return known_.contains(id); }
    const std::vector<AgentId>& order() const { return order_; }

    void route(const AgentId& from, const AgentId& to, Message m) {
      if (to == God) throw Error("moves are never delivered to God");
      if (!knows(to)) throw Error("unknown recipient '" + to + "'");
      channels_[{from, to}].push_back(std::move(m));
    }

    std::deque<Message>* channel(const AgentId& from, const AgentId& to) {
      auto it = channels_.find({from, to});
      return it == channels_.end() ? nullptr : &it->second;
    }

    std::size_t pending() const {
      std::size_t n = 0;
      for (const auto& [_, q]: channels_) n += q.size();
      return n;
    }

  private:
    std::set<AgentId> known_;
    std::vector<AgentId> order_;
    std::map<std::pair<AgentId, AgentId>, std::deque<Message>> channels_;
  };

  struct Agent {
    AgentId id;
    AgentKind kind = AgentKind::Regular;
    ResourceBase rb;
    std::deque<Query> queue;
    Bindings bindings;

    struct Active {
      Query query;
      ResourceBase rb;  // the RB the session was built from
      std::unique_ptr<Session> session;
      std::map<std::size_t, Spec> contract_env;  // contract id -> env node spec in J
      std::map<std::string, std::size_t> env_contract;
    };
    std::optional<Active> active;
  };

  enum class Outcome { Won, Lost, Rejected };

  inline std::string outcome_name(Outcome o) {
    switch (o) {
      case Outcome::Won: return "won";
      case Outcome::Lost: return "lost";
      default: return "rejected";
    }
  }

  struct SessionOutcome {
    AgentId agent;
    std::string query;
    Outcome outcome = Outcome::Rejected;
    std::string proof;  // listing of the executed tree
  };

  // One general/hybrid atom occurrence of a finished session.
  struct AtomRecord {
    AgentId agent;
    std::size_t session = 0;  // index into outcomes
    std::string spec;
    std::string atom;
    std::string game;
    Polarity polarity = Polarity::Positive;
    bool resource_side = false;  // inside the antecedent built from the RB
    std::vector<std::string> payloads;
    bool complete = false;
    bool heuristic = false;
    Player winner = Player::Machine;  // in the atom game's own perspective
  };

  struct SimulationReport {
    std::vector<SessionOutcome> outcomes;
    std::vector<AtomRecord> atoms;
    std::vector<std::string> trace;  // "<seq> <agent> <T|B> <move>"
    std::map<AgentId, std::vector<std::string>> final_rb;
    std::size_t steps = 0;
    bool quiescent = false;
    bool budget_exhausted = false;
    std::size_t redirected = 0;   // moves addressed to God
    std::size_t unrouted = 0;     // moves with no contract to carry them
    std::size_t undelivered = 0;  // still waiting in channels at the end

    bool all_won() const {
      for (const auto& o: outcomes)
        if (o.outcome != Outcome::Won) return false;
      return quiescent && !budget_exhausted;
    }
  };

  struct LedgerLine {
    std::size_t received = 0;
    std::size_t paid = 0;
  };

  // Completed trades with the agent's own providers, by game: at negative
  // occurrences the agent is the customer, at positive ones the supplier.
  inline std::map<std::string, LedgerLine> ledger(const SimulationReport& r, const AgentId& agent) {
    std::map<std::string, LedgerLine> out;
    for (const auto& a: r.atoms) {
      if (a.agent != agent || !a.resource_side || !a.complete) continue;
      if (a.polarity == Polarity::Negative) out[a.atom].received++;
      else out[a.atom].paid++;
    }
    return out;
  }

  class Simulation {
  public:
    Agent& add_agent(Agent a) {
      bus_.add(a.id);
      for (auto& e: a.rb) e.uid = next_uid_++;
      for (auto& q: a.queue) q.uid = next_uid_++;
      agents_.push_back(std::make_unique<Agent>(std::move(a)));
      return *agents_.back();
    }

    Agent* find(const AgentId& id) {
      for (auto& a: agents_)
        if (a->id == id) return a.get();
      return nullptr;
    }

    const std::vector<std::unique_ptr<Agent>>& agents() const { return agents_; }
    const std::vector<Contract>& contracts() const { return contracts_; }
    Bus& bus() { return bus_; }

    void submit_query(Agent& a, Formula q) {
      if (!is_cl2psi(q)) throw Error("malformed query for agent '" + a.id + "'");
      a.queue.push_back({next_uid_++, std::move(q)});
    }

    // Binds every annotated query to a counterpart resource entry.
    void link() {
      contracts_.clear();
      std::set<std::pair<std::size_t, std::string>> claimed;
      for (auto& s: agents_)
        for (const auto& q: s->queue)
          for (const auto& [qs, h]: env_nodes(q.formula)) {
            if (h == God) continue;
            Agent* holder = find(h);
            if (!holder) throw Error("agent '" + s->id + "' queries unknown agent '" + h + "'");
            Formula want = skeleton(at(q.formula, resolve_spec(q.formula, qs)));
            bool bound = false;
            for (const auto& e: holder->rb) {
              for (const auto& [es, who]: env_nodes(e.formula)) {
                if (who != s->id || claimed.contains({e.uid, es.str()})) continue;
                if (!(skeleton(at(e.formula, resolve_spec(e.formula, es))) == want)) continue;
                claimed.insert({e.uid, es.str()});
                contracts_.push_back({contracts_.size() + 1, s->id, q.uid, qs, h, e.uid, es});
                bound = true;
                break;
              }
              if (bound) break;
            }
          }
      for (auto& a: agents_)
        for (const auto& e: a->rb)
          for (const auto& [_, who]: env_nodes(e.formula))
            if (who != God && !bus_.knows(who)) throw Error("agent '" + a->id + "' holds a resource from unknown agent '" + who + "'");
    }

    struct Progress {
      bool progress = false;
    };

    // One visit: open a session, or deliver one message and take one step.
    Progress exec_step(Agent& a) {
      if (!a.active) {
        if (a.queue.empty()) return {};
        open(a);
        return {true};
      }
      bool delivered = deliver_one(a);
      Session& s = *a.active->session;
      std::size_t before = s.position().size();
      auto step = s.step();
      trace_moves(a, before);
      for (const auto& lm: step.outgoing) send(a, lm);
      return {delivered || step.progress};
    }

    SimulationReport run(std::size_t max_steps) {
      report_ = {};
      link_if_needed();
      while (true) {
        bool any = false;
        for (auto& a: agents_) {
          if (report_.steps >= max_steps) {
            report_.budget_exhausted = true;
            return finalize();
          }
          if (exec_step(*a).progress) {
            any = true;
            report_.steps++;
          }
        }
        if (any) continue;
        bool finished = false;
        for (auto& a: agents_)
          if (a->active) {
            close(*a);
            finished = true;
          }
        if (!finished) break;
      }
      report_.quiescent = true;
      return finalize();
    }

  private:
    std::vector<std::unique_ptr<Agent>> agents_;
    Bus bus_;
    std::vector<Contract> contracts_;
    std::size_t next_uid_ = 1;
    bool linked_ = false;
    std::size_t seq_ = 0;
    SimulationReport report_;

    void link_if_needed() {
      if (!linked_) link();
      linked_ = true;
    }

    SimulationReport finalize() {
      for (auto& a: agents_) {
        auto& lines = report_.final_rb[a->id];
        for (const auto& e: a->rb) lines.push_back(print_formula(e.formula));
      }
      report_.undelivered = bus_.pending();
      return std::move(report_);
    }

    void open(Agent& a) {
      Query q = a.queue.front();
      Formula j = session_formula(a.rb, q.formula);
      auto proof = prove(j);
      if (!proof) {
        report_.outcomes.push_back({a.id, print_formula(q.formula), Outcome::Rejected, ""});
        a.queue.pop_front();
        return;
      }
      ProofTree tree = hybridize(*proof);
      Run initial;
      for (std::size_t i = 0; i < a.rb.size(); i++) {
        Spec base = entry_spec(a.rb.size(), i);
        for (const auto& lm: a.rb[i].run) initial.push_back({lm.player, base + lm.spec, lm.payload});
      }
      Agent::Active act{q, a.rb, std::make_unique<Session>(std::make_shared<const ProofTree>(std::move(tree)), a.bindings, a.id, std::move(initial)), {}, {}};
      Spec qbase = query_spec(a.rb);
      for (const auto& c: contracts_) {
        std::optional<Spec> at_j;
        if (c.server == a.id && c.query_uid == q.uid) at_j = qbase + c.query_env;
        for (std::size_t i = 0; i < a.rb.size() && !at_j; i++)
          if (c.holder == a.id && c.entry_uid == a.rb[i].uid) at_j = entry_spec(a.rb.size(), i) + c.entry_env;
        if (!at_j) continue;
        act.contract_env[c.id] = *at_j;
        act.env_contract[at_j->str()] = c.id;
      }
      a.active = std::move(act);
    }

    void close(Agent& a) {
      auto& act = *a.active;
      Session& s = *act.session;
      Player w = s.finish();
      std::size_t index = report_.outcomes.size();
      report_.outcomes.push_back({a.id, print_formula(act.query.formula), w == Player::Machine ? Outcome::Won : Outcome::Lost,
                                  proof_listing(s.node())});
      record_atoms(a, s, index, !act.rb.empty());
      a.rb = evolve_rb(act.rb, s);
      a.queue.pop_front();
      a.active.reset();
    }

    void record_atoms(const Agent& a, const Session& s, std::size_t index, bool has_rb) {
      const Formula& e = s.E();
      std::vector<AtomRecord> recs;
      for (auto kind: {OccurrenceKind::GeneralAtom, OccurrenceKind::HybridAtom})
        for (const auto& occ: surface_occurrences(e, kind)) {
          const Formula& atom = at(e, occ.path);
          const GameDef& g = *s.bindings().games.at(atom.name());
          Run r = game_run(s.position(), occ.spec, occ.polarity);
          AtomRecord rec{a.id, index, occ.spec.str(), atom.name(), g.name(), occ.polarity,
                         has_rb && occ.spec.has_prefix(Spec::parse("1.")), {}, g.complete(r),
                         s.heuristic_specs().contains(occ.spec.str()), g.winner(r)};
          for (const auto& lm: r) rec.payloads.push_back(lm.payload);
          recs.push_back(std::move(rec));
        }
      std::stable_sort(recs.begin(), recs.end(), [](const AtomRecord& x, const AtomRecord& y) { return Spec::parse(x.spec) < Spec::parse(y.spec); });
      report_.atoms.insert(report_.atoms.end(), recs.begin(), recs.end());
    }

    void trace_moves(const Agent& a, std::size_t from) {
      const Run& omega = a.active->session->position();
      for (std::size_t i = from; i < omega.size(); i++)
        report_.trace.push_back(std::to_string(++seq_) + " " + a.id + " " + label(omega[i].player) + " " + omega[i].move());
    }

    void send(Agent& a, const Labmove& lm) {
      auto env = enclosing_env(a.active->session->E(), lm.spec);
      if (!env) return;
      if (env->second == God) {
        report_.redirected++;
        return;
      }
      auto it = a.active->env_contract.find(env->first.str());
      if (it == a.active->env_contract.end()) {
        report_.unrouted++;
        return;
      }
      bus_.route(a.id, env->second, {it->second, lm.spec.strip(env->first), lm.payload});
    }

    bool deliver_one(Agent& a) {
      for (const auto& from: bus_.order()) {
        auto* ch = bus_.channel(from, a.id);
        if (!ch || ch->empty()) continue;
        auto it = a.active->contract_env.find(ch->front().contract);
        if (it == a.active->contract_env.end()) continue;
        Message m = std::move(ch->front());
        ch->pop_front();
        a.active->session->deliver({Player::Environment, it->second + m.rel, m.payload});
        return true;
      }
      return false;
    }

  public:
    // Antecedent residue of the final formula, entry by entry; entries whose
    // games are all played out are dropped.
    static ResourceBase evolve_rb(const ResourceBase& rb, const Session& s) {
      ResourceBase out;
      for (std::size_t i = 0; i < rb.size(); i++) {
        Spec base = entry_spec(rb.size(), i);
        Formula now = revert_hybrids(at(s.E(), resolve_spec(s.E(), base)));
        Run run;
        for (const auto& lm: subrun(s.position(), base))
          if (!is_choice_payload(lm.payload)) run.push_back(lm);
        bool had_games = complexity(rb[i].formula) > 0;
        bool open = !surface_occurrences(now, OccurrenceKind::ChoiceOp).empty();
        for (const auto& occ: surface_occurrences(now, OccurrenceKind::GeneralAtom)) {
          const GameDef& g = *s.bindings().games.at(at(now, occ.path).name());
          if (!g.complete(game_run(run, occ.spec, occ.polarity))) open = true;
        }
        if (had_games && !open) continue;
        out.push_back({rb[i].uid, now, std::move(run)});
      }
      return out;
    }
  };

}

#endif // CLBK_AGENTS_HPP_

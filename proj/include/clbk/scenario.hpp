// clbk :: Scenario files
//
//   agent "*C" kind=provider
//     game C = coffee(zmax=10)
//     script d0 = [v=1]
//     heuristic hC = coffee
//     interp p = true
//     rb ((D{s=d0} -> C{h=hC})) @ God
//     query (D -> C) @ o
//
// One directive per line, `#` starts a comment. Directives after an `agent`
// line belong to that agent.

#ifndef CLBK_SCENARIO_HPP_
#define CLBK_SCENARIO_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include "agents.hpp"
#include "games.hpp"
#include "syntax.hpp"

namespace clbk {

  namespace detail {

    inline std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    }

    inline std::string_view strip_comment(std::string_view s) {
      bool quoted = false;
      for (std::size_t i = 0; i < s.size(); i++) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
      }
      return s;
    }

    inline bool identifier(std::string_view s) {
      if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
      for (char c: s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
      return true;
    }

    class ScenarioReader {
    public:
      explicit ScenarioReader(std::string_view text): text_(text) {}

      Simulation read() {
        std::istringstream in{std::string(text_)};
        std::string raw;
        while (std::getline(in, raw)) {
          line_++;
          std::string_view l = trim(strip_comment(raw));
          if (l.empty()) continue;
          auto sp = l.find_first_of(" \t");
          std::string_view word = l.substr(0, sp);
          std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(l.substr(sp));
          if (word == "agent") begin_agent(rest);
          else if (!cur_) fail("directive '" + std::string(word) + "' outside an agent block");
          else if (word == "game") game(rest);
          else if (word == "script") script(rest);
          else if (word == "heuristic") heuristic(rest);
          else if (word == "interp") interp(rest);
          else if (word == "rb") formula(rest, true);
          else if (word == "query") formula(rest, false);
          else fail("unknown directive '" + std::string(word) + "'");
        }
        flush();
        try {
          sim_.link();
        } catch (const Error& e) {
          throw ParseError(e.what(), line_, 1);
        }
        return std::move(sim_);
      }

    private:
      std::string_view text_;
      std::size_t line_ = 0;
      Simulation sim_;
      std::optional<Agent> cur_;
      std::size_t agent_line_ = 0;
      std::vector<std::pair<std::string, std::string>> heuristic_refs_;  // name, builtin

      [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, 1); }

      std::pair<std::string, std::string> assignment(std::string_view s) {
        auto eq = s.find('=');
        if (eq == std::string_view::npos) fail("expected 'name = value'");
        std::string name(trim(s.substr(0, eq)));
        std::string value(trim(s.substr(eq + 1)));
        if (!identifier(name)) fail("bad name '" + name + "'");
        if (value.empty()) fail("missing value for '" + name + "'");
        return {name, value};
      }

      void begin_agent(std::string_view rest) {
        flush();
        std::string id;
        std::string_view tail;
        if (!rest.empty() && rest[0] == '"') {
          auto close = rest.find('"', 1);
          if (close == std::string_view::npos) fail("unterminated agent id");
          id = rest.substr(1, close - 1);
          tail = trim(rest.substr(close + 1));
        } else {
          auto sp = rest.find_first_of(" \t");
          id = rest.substr(0, sp);
          tail = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp));
        }
        if (!valid_agent_id(id)) fail("bad agent id '" + id + "'");
        if (id == God) fail("God is never declared as an agent");
        cur_ = Agent{};
        cur_->id = id;
        agent_line_ = line_;
        if (!tail.empty()) {
          if (tail == "kind=provider") cur_->kind = AgentKind::Provider;
          else if (tail == "kind=consumer") cur_->kind = AgentKind::Consumer;
          else if (tail == "kind=regular") cur_->kind = AgentKind::Regular;
          else fail("unexpected '" + std::string(tail) + "' after agent id");
        }
      }

      void game(std::string_view rest) {
        auto [name, value] = assignment(rest);
        if (!std::isupper(static_cast<unsigned char>(name[0]))) fail("general atoms are capitalized: '" + name + "'");
        try {
          cur_->bindings.games[name] = make_game(value);
        } catch (const Error& e) {
          fail(e.what());
        }
      }

      void script(std::string_view rest) {
        auto [name, value] = assignment(rest);
        if (value.front() != '[' || value.back() != ']') fail("script must be a bracketed move list");
        Script moves;
        std::string_view body = trim(std::string_view(value).substr(1, value.size() - 2));
        while (!body.empty()) {
          auto comma = body.find(',');
          std::string m(trim(body.substr(0, comma)));
          if (!is_atom_payload(m)) fail("bad script move '" + m + "'");
          moves.push_back(m);
          body = comma == std::string_view::npos ? std::string_view{} : trim(body.substr(comma + 1));
        }
        cur_->bindings.scripts[name] = std::move(moves);
      }

      void heuristic(std::string_view rest) {
        auto [name, value] = assignment(rest);
        if (value != "coffee" && value != "dollar") fail("unknown heuristic '" + value + "'");
        heuristic_refs_.push_back({name, value});
      }

      void interp(std::string_view rest) {
        auto [name, value] = assignment(rest);
        if (value != "true" && value != "false") fail("interpretation must be true or false");
        cur_->bindings.interpretation[name] = value == "true";
      }

      void formula(std::string_view rest, bool rb) {
        Formula f = Formula::top();
        try {
          f = parse_formula(rest);
        } catch (const ParseError& e) {
          throw ParseError(e.message, line_, e.column);
        }
        if (!is_cl2psi(f)) fail("formula is not well formed");
        if (rb) cur_->rb.push_back({0, f, {}});
        else cur_->queue.push_back({0, f});
      }

      void flush() {
        if (!cur_) return;
        Agent& a = *cur_;
        for (const auto& [name, builtin]: heuristic_refs_) {
          std::shared_ptr<const GameDef> game;
          for (const auto& [_, g]: a.bindings.games)
            if (g->name() == builtin) game = g;
          a.bindings.heuristics[name] = *builtin_heuristic(builtin, game);
        }
        heuristic_refs_.clear();
        auto check = [&](const Formula& f) {
          auto walk = [&](auto& self, const Formula& g) -> void {
            if (g.is(Kind::General) || g.is(Kind::Hybrid)) {
              if (!a.bindings.games.contains(g.name())) throw ParseError("agent '" + a.id + "' has no game for atom '" + g.name() + "'", agent_line_, 1);
              const Annotation& ann = g.annotation();
              if (ann.kind == AnnotationKind::Script && !a.bindings.scripts.contains(ann.name))
                throw ParseError("agent '" + a.id + "' has no script '" + ann.name + "'", agent_line_, 1);
              if (ann.kind == AnnotationKind::Heuristic && !a.bindings.heuristics.contains(ann.name))
                throw ParseError("agent '" + a.id + "' has no heuristic '" + ann.name + "'", agent_line_, 1);
            }
            for (const auto& k: g.kids()) self(self, k);
          };
          walk(walk, f);
        };
        for (const auto& e: a.rb) check(e.formula);
        for (const auto& q: a.queue) check(q.formula);
        if (a.kind == AgentKind::Provider) {
          bool manual = false;
          for (const auto& e: a.rb)
            for (const auto& [_, who]: env_nodes(e.formula)) manual = manual || who == God;
          if (!manual) throw ParseError("provider '" + a.id + "' has no God-annotated manual in its resource base", agent_line_, 1);
        }
        try {
          sim_.add_agent(std::move(a));
        } catch (const Error& e) {
          throw ParseError(e.what(), agent_line_, 1);
        }
        cur_.reset();
      }
    };

  }

  inline Simulation load_scenario(std::string_view text) { return detail::ScenarioReader(text).read(); }

  inline Simulation load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
  }

}

#endif // CLBK_SCENARIO_HPP_

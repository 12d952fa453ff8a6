// clbk: command-line driver.
//
//   clbk prove SRC [--tree] [--hybrid]
//   clbk play SRC [--scripts FILE] [--interactive] [--max-steps N] [--trace PATH]
//   clbk simulate PATH [--trace-dir DIR] [--max-steps N]
//   clbk fmt PATH
//
// Exit status: 0 success, 1 unprovable, 2 input error, 3 incomplete run.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <CLI11.hpp>
#include <clbk/clbk.hpp>

namespace {

  using namespace clbk;

  constexpr int kOk = 0, kUnprovable = 1, kInputError = 2, kIncomplete = 3;

  std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  Bindings default_bindings() {
    Bindings b;
    b.games["C"] = make_game("coffee(zmax=10)");
    b.games["D"] = make_game("dollar(vmax=5)");
    b.heuristics["coffee"] = *builtin_heuristic("coffee", b.games["C"]);
    b.heuristics["dollar"] = *builtin_heuristic("dollar", b.games["D"]);
    return b;
  }

  // A scripts file uses the agent-block directives of scenario files.
  Bindings load_bindings(const std::string& path) {
    Bindings b = default_bindings();
    if (path.empty()) return b;
    Simulation sim = load_scenario("agent play\n" + slurp(path));
    const Bindings& extra = sim.agents().front()->bindings;
    for (const auto& [k, v]: extra.games) b.games[k] = v;
    for (const auto& [k, v]: extra.heuristics) b.heuristics[k] = v;
    for (const auto& [k, v]: extra.scripts) b.scripts[k] = v;
    for (const auto& [k, v]: extra.interpretation) b.interpretation[k] = v;
    return b;
  }

  int cmd_prove(const std::string& src, bool tree, bool hybrid) {
    Formula f = parse_formula(src);
    auto proof = prove(f);
    if (!proof) {
      std::cout << "unprovable\n";
      return kUnprovable;
    }
    if (hybrid) std::cout << proof_listing(hybridize(*proof));
    else if (tree) std::cout << proof_listing(*proof);
    else std::cout << "provable\n";
    return kOk;
  }

  int cmd_play(const std::string& src, const std::string& scripts, bool interactive, std::size_t max_steps, const std::string& trace_path) {
    Formula f = parse_formula(src);
    Bindings b = load_bindings(scripts);
    auto proof = prove(f);
    if (!proof) {
      std::cout << "unprovable\n";
      return kUnprovable;
    }
    Session s = new_session(hybridize(*proof), std::move(b), "local");
    if (interactive) {
      s.machine_turn();
      std::string line;
      while (std::getline(std::cin, line)) {
        std::string_view l = detail::trim(line);
        if (l.empty() || l[0] == '#') continue;
        if (l[0] == 'B') l = detail::trim(l.substr(1));
        try {
          auto [spec, payload] = parse_move(l);
          for (const auto& out: s.env_move({Player::Environment, spec, payload})) std::cout << label(out.player) << " " << out.move() << "\n";
        } catch (const Error& e) {
          std::cerr << "ignored: " << e.what() << "\n";
        }
        std::cout.flush();
      }
    }
    bool exhausted = false;
    for (std::size_t i = 0;; i++) {
      if (i >= max_steps) {
        exhausted = true;
        break;
      }
      if (!s.step().progress) break;
    }
    std::ostringstream trace;
    std::size_t seq = 0;
    for (const auto& lm: s.position()) trace << ++seq << " " << s.owner() << " " << label(lm.player) << " " << lm.move() << "\n";
    std::cout << trace.str();
    if (!trace_path.empty()) {
      std::ofstream out(trace_path);
      if (!out) throw Error("cannot write '" + trace_path + "'");
      out << trace.str();
    }
    Player w = s.finish();
    std::cout << "winner: " << label(w) << "\n";
    return exhausted && max_steps > 0 ? kIncomplete : kOk;
  }

  std::string file_name(const AgentId& id) {
    std::string out;
    for (char c: id) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out + ".trace";
  }

  int cmd_simulate(const std::string& path, const std::string& trace_dir, std::size_t max_steps) {
    Simulation sim = load_scenario_file(path);
    std::vector<AgentId> order;
    for (const auto& a: sim.agents()) order.push_back(a->id);
    SimulationReport r = sim.run(max_steps);

    for (const auto& o: r.outcomes) std::cout << "session " << o.agent << " " << outcome_name(o.outcome) << " " << o.query << "\n";
    for (const auto& id: order)
      for (const auto& [atom, line]: ledger(r, id))
        std::cout << "ledger " << id << " " << atom << " received " << line.received << " paid " << line.paid << "\n";
    std::cout << "steps: " << r.steps << (r.budget_exhausted ? " (budget exhausted)" : "") << "\n";
    std::string summary;
    for (const auto& id: order) {
      std::size_t won = 0, total = 0;
      for (const auto& o: r.outcomes)
        if (o.agent == id) {
          total++;
          won += o.outcome == Outcome::Won;
        }
      if (!summary.empty()) summary += "; ";
      summary += id + ": " + std::to_string(won) + "/" + std::to_string(total) + " won";
    }
    std::cout << summary << "\n";

    if (!trace_dir.empty()) {
      std::filesystem::create_directories(trace_dir);
      std::ofstream all(std::filesystem::path(trace_dir) / "all.trace");
      for (const auto& l: r.trace) all << l << "\n";
      for (const auto& id: order) {
        std::ofstream out(std::filesystem::path(trace_dir) / file_name(id));
        std::string prefix = " " + id + " ";
        for (const auto& l: r.trace)
          if (l.find(prefix) == l.find(' ')) out << l << "\n";
      }
      if (!all || !std::filesystem::exists(std::filesystem::path(trace_dir) / "all.trace")) throw Error("cannot write traces to '" + trace_dir + "'");
    }
    return r.all_won() ? kOk : kIncomplete;
  }

  int cmd_fmt(const std::string& path) {
    std::istringstream in(slurp(path));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      n++;
      std::string_view l = detail::trim(line);
      if (l.empty() || l[0] == '#') continue;
      try {
        std::cout << print_formula(parse_formula(l)) << "\n";
      } catch (const ParseError& e) {
        throw ParseError(e.message, n, e.column);
      }
    }
    return kOk;
  }

}

int main(int argc, char** argv) {
  CLI::App app{"clbk: computability-logic knowledge bases"};
  app.require_subcommand(1);

  std::string src, scripts, trace_path, trace_dir, path;
  bool tree = false, hybrid = false, interactive = false;
  std::size_t play_steps = 100000, sim_steps = 1000000;

  auto* prove_cmd = app.add_subcommand("prove", "prove a formula and print its proof");
  prove_cmd->add_option("source", src, "formula text")->required();
  prove_cmd->add_flag("--tree", tree, "print the proof listing");
  prove_cmd->add_flag("--hybrid", hybrid, "print the hybridized proof listing");

  auto* play_cmd = app.add_subcommand("play", "execute a proof against scripted or interactive moves");
  play_cmd->add_option("source", src, "formula text")->required();
  play_cmd->add_option("--scripts", scripts, "games, scripts and heuristics in scenario syntax");
  play_cmd->add_flag("--interactive", interactive, "read environment moves from standard input");
  play_cmd->add_option("--max-steps", play_steps, "step budget");
  play_cmd->add_option("--trace", trace_path, "write the trace to a file");

  auto* sim_cmd = app.add_subcommand("simulate", "run a multi-agent scenario");
  sim_cmd->add_option("scenario", path, "scenario file")->required();
  sim_cmd->add_option("--trace-dir", trace_dir, "directory for per-agent traces");
  sim_cmd->add_option("--max-steps", sim_steps, "step budget");

  auto* fmt_cmd = app.add_subcommand("fmt", "print each formula of a file in canonical form");
  fmt_cmd->add_option("path", path, "formula file, one formula per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*prove_cmd) return cmd_prove(src, tree, hybrid);
    if (*play_cmd) return cmd_play(src, scripts, interactive, play_steps, trace_path);
    if (*sim_cmd) return cmd_simulate(path, trace_dir, sim_steps);
    if (*fmt_cmd) return cmd_fmt(path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

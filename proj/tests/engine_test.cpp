#include <gtest/gtest.h>
#include <clbk/engine.hpp>
#include <clbk/games.hpp>
#include "generators.hpp"

using namespace clbk;

namespace {

  Formula F(std::string_view s) { return parse_formula(s); }

  Labmove B(std::string_view move) {
    auto [spec, payload] = parse_move(move);
    return {Player::Environment, spec, payload};
  }

  Labmove T(std::string_view move) {
    auto [spec, payload] = parse_move(move);
    return {Player::Machine, spec, payload};
  }

  Bindings coffee_dollar() {
    Bindings b;
    b.games["C"] = make_game("coffee(zmax=10)");
    b.games["D"] = make_game("dollar(vmax=5)");
    b.heuristics["coffee"] = *builtin_heuristic("coffee", b.games["C"]);
    b.heuristics["dollar"] = *builtin_heuristic("dollar", b.games["D"]);
    return b;
  }

  Session session_for(std::string_view text, Bindings b = coffee_dollar(), clbk::Run initial = {}) {
    auto t = prove(F(text));
    if (!t) throw Error("unprovable fixture");
    return new_session(hybridize(*t), std::move(b), "me", std::move(initial));
  }

  std::vector<std::string> strs(const std::vector<Labmove>& v) {
    std::vector<std::string> out;
    for (const auto& lm: v) out.push_back(lm.str());
    return out;
  }

  // Payload-equal with complementary labels, position by position.
  ::testing::AssertionResult copy_cat_holds(const Session& s) {
    for (const auto& [pi, nu]: hybrid_pairs(s.E())) {
      clbk::Run a = game_run(s.position(), pi, Polarity::Positive);
      clbk::Run b = game_run(s.position(), nu, Polarity::Positive);
      if (a.size() != b.size()) return ::testing::AssertionFailure() << "length mismatch at " << pi.str() << " / " << nu.str();
      for (std::size_t i = 0; i < a.size(); i++)
        if (a[i].payload != b[i].payload || a[i].player == b[i].player)
          return ::testing::AssertionFailure() << "mismatch at " << pi.str() << " / " << nu.str() << " #" << i;
    }
    return ::testing::AssertionSuccess();
  }

}

TEST(Moves, ParseAndRender) {
  auto [s1, p1] = parse_move("2.1.x=3");
  EXPECT_EQ(s1.str(), "2.1.");
  EXPECT_EQ(p1, "x=3");
  auto [s2, p2] = parse_move("2.1");
  EXPECT_EQ(s2.str(), "2.");
  EXPECT_EQ(p2, "1");
  auto [s3, p3] = parse_move("1");
  EXPECT_EQ(s3.str(), "");
  EXPECT_EQ(p3, "1");
  EXPECT_THROW(parse_move("2.1."), Error);
  EXPECT_THROW(parse_move("2.X"), Error);
  EXPECT_EQ(T("2.1.x=3").str(), "T2.1.x=3");
}

TEST(Subrun, Examples) {
  clbk::Run omega{B("1.1.x=3"), T("2.1.x=3")};
  EXPECT_EQ(subrun(omega, Spec::parse("1.1.")), (clbk::Run{B("x=3")}));
  EXPECT_EQ(subrun(omega, Spec{}), omega);
  EXPECT_TRUE(subrun(omega, Spec::parse("3.")).empty());
}

TEST(Session, NewSessionCoffeeProof) {
  Session s = session_for("(C /\\ C) -> (C \\/ C) @ w");
  EXPECT_EQ(surface_occurrences(s.E(), OccurrenceKind::GeneralAtom).size(), 4u);
  EXPECT_EQ(s.activated(), (std::set<AgentId>{"w"}));
  EXPECT_TRUE(s.position().empty());
}

TEST(Session, NoBindingsForElementary) {
  EXPECT_NO_THROW(session_for("p -> p", Bindings{}));
}

TEST(Session, MissingGameIsAnError) {
  Bindings b;
  b.games["C"] = make_game("coffee");
  EXPECT_THROW(session_for("D -> D", b), Error);
}

TEST(MachineTurn, FreshCoffeeSessionEmitsNothing) {
  Session s = session_for("(C /\\ C) -> (C \\/ C) @ w");
  EXPECT_TRUE(s.machine_turn().empty());
  EXPECT_TRUE(s.at_a_node());
  EXPECT_EQ(print_formula(s.E()), "(C_p /\\ C_q) -> (C_p \\/ C_q) @ w");
}

TEST(MachineTurn, ReplaysStoredSubrun) {
  Session s = session_for("(C /\\ C) -> (C \\/ C) @ w", coffee_dollar(), clbk::Run{B("1.1.x=3")});
  EXPECT_EQ(strs(s.machine_turn()), (std::vector<std::string>{"T2.1.x=3"}));
}

TEST(MachineTurn, RuleBEmitsChoice) {
  Session s = session_for("((p & q) -> q) @ w");
  auto out = s.machine_turn();
  EXPECT_EQ(strs(out), (std::vector<std::string>{"T1.2"}));
  auto env = enclosing_env(s.E(), out[0].spec);
  ASSERT_TRUE(env);
  EXPECT_EQ(env->second, "w");
}

TEST(EnvMove, HybridCopyCat) {
  Session s = session_for("(C /\\ C) -> (C \\/ C) @ w");
  s.machine_turn();
  EXPECT_EQ(strs(s.env_move(B("2.1.x=3"))), (std::vector<std::string>{"T1.1.x=3"}));
  EXPECT_EQ(s.position(), (clbk::Run{B("2.1.x=3"), T("1.1.x=3")}));
}

TEST(EnvMove, ChoiceThenMachineChoice) {
  Session s = session_for("((p & q) -> (p & q))");
  s.machine_turn();
  auto out = s.env_move(B("2.1"));
  EXPECT_EQ(print_formula(s.E()), "p -> p");
  EXPECT_EQ(strs(out), (std::vector<std::string>{"T1.1"}));
}

TEST(EnvMove, IgnoresUnaddressedAndIllegal) {
  Session s = session_for("(C /\\ C) -> (C \\/ C) @ w");
  s.machine_turn();
  EXPECT_TRUE(s.env_move(B("3.1.x=3")).empty());
  EXPECT_TRUE(s.env_move(B("2.1.y=3")).empty());   // y before x
  EXPECT_TRUE(s.env_move(B("2.1.z=3")).empty());   // machine's move in this game
  EXPECT_TRUE(s.env_move(B("2.1")).empty());       // not a choice
  EXPECT_TRUE(s.position().empty());
}

TEST(Pump, ScriptOrderAndPeerPriority) {
  Bindings b = coffee_dollar();
  b.scripts["c0"] = {"x=3", "y=1"};
  Session s = session_for("C{h=coffee} -> C{s=c0}", b);
  s.machine_turn();
  s.deliver(B("1.x=2"));
  auto first = s.pump_environment();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->str(), "B1.x=2");
  auto second = s.pump_environment();
  ASSERT_TRUE(second);
  EXPECT_EQ(second->str(), "B2.x=3");
}

TEST(Pump, ExhaustedSourcesGoQuiescent) {
  Session s = session_for("C -> C");
  auto step = s.step();
  EXPECT_TRUE(step.progress || s.at_a_node());
  while (s.step().progress) {}
  EXPECT_FALSE(s.pump_environment());
  EXPECT_EQ(s.status(), Status::Quiescent);
}

TEST(Heuristics, Coffee) {
  EXPECT_EQ(coffee_heuristic(clbk::Run{B("x=3"), B("y=1")}, 10), "z=4");
  EXPECT_EQ(coffee_heuristic(clbk::Run{B("x=4"), B("y=2")}, 10), "z=9");
  EXPECT_EQ(coffee_heuristic(clbk::Run{B("x=3"), B("y=4")}, 10), "z=10");
  EXPECT_EQ(coffee_heuristic(clbk::Run{B("x=3")}, 10), std::nullopt);
  EXPECT_EQ(coffee_heuristic(clbk::Run{B("x=3"), B("y=1"), T("z=4")}, 10), std::nullopt);
}

TEST(Heuristics, CoffeeMatchesBruteForceArgmin) {
  for (long x = 0; x < 6; x++)
    for (long y = 0; y < 6; y++) {
      long target = x * y + 1, best = 1;
      for (long k = 10; k >= 1; k--)
        if (std::labs(k - target) <= std::labs(best - target)) best = k;
      clbk::Run r{B("x=" + std::to_string(x)), B("y=" + std::to_string(y))};
      EXPECT_EQ(coffee_heuristic(r, 10), "z=" + std::to_string(best));
    }
}

TEST(Games, CoffeeWinner) {
  CoffeeGame g(10);
  EXPECT_EQ(g.winner(clbk::Run{B("x=3"), B("y=1"), T("z=4")}), Player::Machine);
  EXPECT_EQ(g.winner(clbk::Run{B("x=3"), B("y=1"), T("z=5")}), Player::Environment);
  EXPECT_EQ(g.winner(clbk::Run{B("x=3"), B("y=1")}), Player::Environment);
  EXPECT_EQ(g.winner(clbk::Run{B("x=3")}), Player::Machine);
  EXPECT_EQ(g.winner(clbk::Run{}), Player::Machine);
  EXPECT_FALSE(g.legal(clbk::Run{B("x=3"), B("y=1")}, Player::Machine, "z=11"));
}

TEST(Games, DollarWinner) {
  DollarGame g(5);
  EXPECT_EQ(g.winner(clbk::Run{B("v=2"), T("r=4")}), Player::Machine);
  EXPECT_EQ(g.winner(clbk::Run{B("v=2"), T("r=3")}), Player::Environment);
  EXPECT_EQ(g.winner(clbk::Run{B("v=2")}), Player::Environment);
  EXPECT_EQ(g.winner(clbk::Run{}), Player::Machine);
  EXPECT_FALSE(g.legal(clbk::Run{}, Player::Environment, "v=6"));
  EXPECT_EQ(dollar_heuristic(clbk::Run{B("v=3")}), "r=6");
}

TEST(Games, Factory) {
  EXPECT_EQ(make_game("coffee(zmax=7)")->name(), "coffee");
  EXPECT_THROW(make_game("tea"), Error);
  EXPECT_THROW(make_game("coffee(vmax=2)"), Error);
}

TEST(Winner, ElementaryAndEmptyGames) {
  Bindings b;
  b.interpretation["p"] = false;
  Session s = session_for("p -> p", b);
  while (s.step().progress) {}
  EXPECT_EQ(s.evaluate_winner(), Player::Machine);

  Session t = session_for("(C /\\ C) -> (C \\/ C)");
  while (t.step().progress) {}
  EXPECT_EQ(t.finish(), Player::Machine);
  EXPECT_EQ(t.status(), Status::Finished);
}

TEST(Winner, RequiresQuiescence) {
  Session s = session_for("p -> p", Bindings{});
  EXPECT_THROW(s.evaluate_winner(), Error);
}

TEST(CopyCat, CoffeeIdentityGame) {
  Bindings b = coffee_dollar();
  b.scripts["c0"] = {"x=3", "y=1"};
  Session s = session_for("C{h=coffee} -> C{s=c0}", b);
  auto out = s.run_to_quiescence();
  EXPECT_EQ(strs(s.position()), (std::vector<std::string>{"B2.x=3", "T1.x=3", "B2.y=1", "T1.y=1", "B1.z=4", "T2.z=4"}));
  EXPECT_EQ(s.heuristic_specs(), (std::set<std::string>{"1."}));
  EXPECT_TRUE(copy_cat_holds(s));
  EXPECT_EQ(s.finish(), Player::Machine);
}

TEST(CopyCat, RandomScriptsOnRandomProvableFormulas) {
  fuzz::Gen gen(2026);
  const std::vector<std::string> payloads{"x=1", "x=3", "y=1", "y=2", "z=2", "z=4", "z=7", "v=1", "v=3", "r=2", "r=6", "r=5"};
  int sessions = 0, attempts = 0;
  while (sessions < 100 && attempts < 5000) {
    attempts++;
    Formula f = gen.cl2psi(2);
    if (complexity(f) == 0) continue;
    auto t = prove(f);
    if (!t) continue;
    bool has_general = !surface_occurrences(f, OccurrenceKind::GeneralAtom).empty();
    if (!has_general) continue;
    sessions++;
    Bindings b = coffee_dollar();
    b.interpretation["a"] = gen.coin();
    b.interpretation["b"] = gen.coin();
    Session s = new_session(hybridize(*t), b, "me");
    s.machine_turn();
    std::size_t moves = 5 + gen.below(30);
    for (std::size_t i = 0; i < moves; i++) {
      auto occs = surface_occurrences(s.E(), OccurrenceKind::HybridAtom);
      for (auto kind: {OccurrenceKind::GeneralAtom, OccurrenceKind::ChoiceOp}) {
        auto more = surface_occurrences(s.E(), kind);
        occs.insert(occs.end(), more.begin(), more.end());
      }
      if (occs.empty()) break;
      const Occurrence& o = gen.pick(occs);
      std::string payload = gen.coin(0.2) ? std::to_string(1 + gen.below(3)) : gen.pick(payloads);
      s.env_move({Player::Environment, o.spec, payload});
      ASSERT_TRUE(s.at_a_node());
    }
    while (s.step().progress) {}
    ASSERT_TRUE(copy_cat_holds(s)) << print_formula(f);
    EXPECT_EQ(s.finish(), Player::Machine) << print_formula(f) << "\n" << print_formula(s.E());
  }
  EXPECT_EQ(sessions, 100);
}

#include <chrono>
#include <gtest/gtest.h>
#include <clbk/prover.hpp>
#include "generators.hpp"
#include "mutations.hpp"

using namespace clbk;

namespace {

  Formula F(std::string_view s) { return parse_formula(s); }

  std::vector<const ProofTree*> nodes(const ProofTree& t) {
    std::vector<const ProofTree*> out{&t};
    for (const auto& p: t.premises) {
      auto sub = nodes(p);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }

}

TEST(Prover, CoffeeExampleProof) {
  long before = measure_violations;
  auto start = std::chrono::steady_clock::now();
  auto t = prove(F("(C /\\ C) -> (C \\/ C) @ w"));
  auto elapsed = std::chrono::steady_clock::now() - start;
  ASSERT_TRUE(t);
  EXPECT_LT(elapsed, std::chrono::seconds(1));
  EXPECT_EQ(t->size(), 3u);
  EXPECT_EQ(rule_letter(t->rule), 'C');
  EXPECT_EQ(rule_letter(t->premises[0].rule), 'C');
  EXPECT_EQ(rule_letter(t->premises[0].premises[0].rule), 'A');
  EXPECT_TRUE(verify_proof(*t));

  ProofTree h = hybridize(*t);
  EXPECT_TRUE(verify_proof(h));
  EXPECT_EQ(print_formula(h.premises[0].premises[0].conclusion), "(C_p /\\ C_q) -> (C_p \\/ C_q) @ w");
  EXPECT_EQ(proof_listing(h),
            "1 (C_p /\\ C_q) -> (C_p \\/ C_q) @ w rule A 0\n"
            "2 (C_p /\\ C) -> (C_p \\/ C) @ w rule C 1\n"
            "3 (C /\\ C) -> (C \\/ C) @ w rule C 2\n");
  EXPECT_EQ(measure_violations, before);
}

TEST(Prover, FixtureVerdicts) {
  auto start = std::chrono::steady_clock::now();
  for (auto s: {"(p /\\ q) -> (p \\/ q)", "((p & q) -> (p & q)) @ w", "(p & q) -> p", "(p & q) -> q",
                "C -> C @ w", "p -> p", "(P @ w) -> (P @ u)", "(C /\\ D) -> (D /\\ C)"})
    EXPECT_TRUE(prove(F(s))) << s;
  for (auto s: {"P -> (P /\\ P)", "C \\/ C", "p | ~p", "p -> (p & q)", "(C \\/ C) -> (C /\\ C)", "P -> Q"})
    EXPECT_FALSE(prove(F(s))) << s;
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(Prover, RuleShapes) {
  auto b = prove(F("(p & q) -> q"));
  ASSERT_TRUE(b);
  ASSERT_EQ(rule_letter(b->rule), 'B');
  EXPECT_EQ(std::get<RuleB>(b->rule).spec.str(), "1.");
  EXPECT_EQ(std::get<RuleB>(b->rule).branch, 2u);

  auto a = prove(F("((p & q) -> (p & q)) @ w"));
  ASSERT_TRUE(a);
  ASSERT_EQ(rule_letter(a->rule), 'A');
  ASSERT_EQ(a->premises.size(), 2u);
  ASSERT_NE(a->premise_for(Spec::parse("2."), 2), nullptr);
  EXPECT_EQ(print_formula(a->premise_for(Spec::parse("2."), 2)->conclusion), "(p & q) -> q @ w");
}

TEST(Prover, PremiseGenerators) {
  Formula f = F("(C /\\ C) -> (C \\/ C)");
  auto cs = premises_C(f);
  ASSERT_EQ(cs.size(), 4u);
  EXPECT_EQ(cs[0].pos_spec.str(), "2.1.");
  EXPECT_EQ(cs[0].neg_spec.str(), "1.1.");
  EXPECT_EQ(print_formula(cs[0].formula), "(p /\\ C) -> (p \\/ C)");
  EXPECT_EQ(print_formula(premises_C(F("p -> (C \\/ ~C)"))[0].formula), "p -> (q \\/ ~q)");

  auto as = premises_A(F("(p & q) -> (r & s)"));
  ASSERT_EQ(as.size(), 2u);
  EXPECT_EQ(as[0].spec.str(), "2.");
  auto bs = premises_B(F("(p & q) -> (r & s)"));
  ASSERT_EQ(bs.size(), 2u);
  EXPECT_EQ(bs[1].spec.str(), "1.");
  EXPECT_EQ(print_formula(bs[1].formula), "q -> (r & s)");
}

TEST(Prover, StableExamples) {
  EXPECT_FALSE(is_stable(F("(p & q) -> p")));
  EXPECT_TRUE(is_stable(F("(p & q) -> (p & q)")));
  EXPECT_FALSE(is_stable(F("P -> P")));
  EXPECT_TRUE(is_stable(F("p -> (p & q)")));
}

TEST(Prover, RandomProofsVerifyAndMutationsFail) {
  long before = measure_violations;
  fuzz::Gen gen(31337);
  int found = 0, attempts = 0;
  while (found < 100 && attempts < 20000) {
    attempts++;
    Formula f = gen.cl2psi(1 + static_cast<int>(gen.below(3)));
    auto t = prove(f);
    if (!t) continue;
    found++;
    ASSERT_TRUE(verify_proof(*t)) << print_formula(f);
    ProofTree h = hybridize(*t);
    ASSERT_TRUE(verify_proof(h)) << print_formula(f);
    for (int m = 0; m < 5; m++) {
      ProofTree bad = *t;
      fuzz::mutate(bad, gen);
      EXPECT_FALSE(verify_proof(bad)) << print_formula(f) << "\n" << proof_listing(bad);
    }
  }
  EXPECT_EQ(found, 100);
  EXPECT_EQ(measure_violations, before);
}

TEST(Prover, VerifierRejectsWrongPremiseFormula) {
  auto t = prove(F("(p & q) -> p"));
  ASSERT_TRUE(t);
  ProofTree bad = *t;
  bad.premises[0].conclusion = F("q -> p");
  EXPECT_FALSE(verify_proof(bad));
}

TEST(Prover, VerifierRejectsUnstableA) {
  ProofTree t{F("p -> q"), RuleA{}, {}, {}};
  EXPECT_FALSE(verify_proof(t));
  ProofTree ok{F("p -> p"), RuleA{}, {}, {}};
  EXPECT_TRUE(verify_proof(ok));
}

TEST(Prover, DeterministicListing) {
  fuzz::Gen gen(8);
  for (int i = 0; i < 50; i++) {
    Formula f = gen.cl2psi(2);
    auto a = prove(f), b = prove(f);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_EQ(proof_listing(*a), proof_listing(*b));
  }
}

TEST(Prover, VerdictIgnoresEnvironmentAnnotations) {
  fuzz::Gen gen(12);
  for (int i = 0; i < 150; i++) {
    Formula f = gen.cl2psi(2);
    EXPECT_EQ(prove(f).has_value(), prove(skeleton(f)).has_value()) << print_formula(f);
  }
}

TEST(Prover, ProvableImpliesStableLeaves) {
  fuzz::Gen gen(77);
  for (int i = 0; i < 200; i++) {
    Formula f = gen.cl2psi(2);
    auto t = prove(f);
    if (!t) continue;
    for (const auto* n: nodes(*t))
      if (n->premises.empty()) {
        EXPECT_EQ(rule_letter(n->rule), 'A');
        EXPECT_TRUE(is_stable(n->conclusion));
      }
  }
}

TEST(Prover, FreshAtomsAvoidExistingNames) {
  auto t = prove(F("(p /\\ C) -> (p /\\ C)"));
  ASSERT_TRUE(t);
  ASSERT_EQ(rule_letter(t->rule), 'C');
  EXPECT_EQ(std::get<RuleC>(t->rule).atom, "q");
}

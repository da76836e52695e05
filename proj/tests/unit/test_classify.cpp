#include "bvk/classify.hpp"
#include "systems.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bvk;
using bvk::testing::load_system;

namespace {

std::uint64_t brute_frobenius(const std::vector<std::uint64_t>& k, std::uint64_t limit) {
  std::vector<bool> reach(limit + 1, false);
  reach[0] = true;
  for (std::uint64_t x = 1; x <= limit; ++x)
    for (auto v : k)
      if (x >= v && reach[x - v]) reach[x] = true;
  std::uint64_t last_gap = 0;
  for (std::uint64_t x = 1; x <= limit; ++x)
    if (!reach[x]) last_gap = x;
  return last_gap + 1;
}

ClopenSet floors(std::size_t level, std::initializer_list<std::uint64_t> fs) {
  ClopenSet u{level, {}};
  for (auto f : fs) u.cells.insert(Cell{0, f});
  return u;
}

IntMatrix mat(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(Frobenius, Examples) {
  EXPECT_EQ(frobenius({3, 5}), 8u);
  EXPECT_EQ(frobenius({1}), 1u);
  EXPECT_EQ(frobenius({2, 3}), 2u);
  EXPECT_THROW(frobenius({4, 6}), PreconditionError);
  EXPECT_THROW(frobenius({}), PreconditionError);
}

TEST(Frobenius, AgreesWithBruteForce) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint64_t> k(2 + rng() % 2);
    for (auto& x : k) x = 1 + rng() % 15;
    std::uint64_t g = 0;
    for (auto x : k) g = std::gcd(g, x);
    if (g != 1) continue;
    EXPECT_EQ(frobenius(k), brute_frobenius(k, 400));
  }
}

TEST(Represent, Examples) {
  EXPECT_EQ(represent(8, {3, 5}), (std::vector<std::uint64_t>{1, 1}));
  EXPECT_FALSE(represent(7, {3, 5}));
  EXPECT_EQ(represent(0, {3, 5}), (std::vector<std::uint64_t>{0, 0}));
  // Lexicographically least: 15 = 0*3 + 3*5 rather than 5*3.
  EXPECT_EQ(represent(15, {3, 5}), (std::vector<std::uint64_t>{0, 3}));
}

TEST(K0Morphism, Examples) {
  DimGroup dy(load_system("dyadic")), quat(load_system("quaternary")), tri(load_system("triadic"));
  auto r = build_k0_morphism(dy, 2, quat, 0);
  ASSERT_EQ(r.status, K0MorphismResult::Status::Ok);
  EXPECT_EQ(r.morphism.p, 4);
  EXPECT_EQ(r.morphism.t(0, 0), quat.diagram().heights(r.morphism.level_b)[0] / 4);
  EXPECT_TRUE(verify_k0_morphism(dy.diagram(), quat.diagram(), r.morphism));

  auto o = build_k0_morphism(dy, 1, tri, 0);
  EXPECT_EQ(o.status, K0MorphismResult::Status::Obstruction);
  EXPECT_EQ(o.obstruction, 2);
  ASSERT_TRUE(o.certificate);
  EXPECT_TRUE(verify_residue_cycle(tri.diagram(), *o.certificate));

  auto id = build_k0_morphism(dy, 0, dy, 0);
  ASSERT_EQ(id.status, K0MorphismResult::Status::Ok);
  EXPECT_EQ(id.morphism.t, mat({{1}}));
}

TEST(K0Morphism, MultiTowerUnitPreserved) {
  for (const char* a : {"fibonacci", "twotwo", "tribonacci_like"}) {
    for (const char* b : {"fibonacci", "twotwo", "allones"}) {
      DimGroup ga(load_system(a)), gb(load_system(b));
      for (std::size_t level = 1; level <= 3; ++level) {
        auto r = build_k0_morphism(ga, level, gb, 1);
        if (r.status != K0MorphismResult::Status::Ok) continue;
        EXPECT_TRUE(verify_k0_morphism(ga.diagram(), gb.diagram(), r.morphism)) << a << " " << b;
      }
    }
  }
}

TEST(Weak, Examples) {
  DimGroup dy(load_system("dyadic")), quat(load_system("quaternary")), tri(load_system("triadic")),
      fib(load_system("fibonacci"));
  auto yes = decide_weak(dy, quat);
  EXPECT_EQ(yes.verdict, Verdict::Yes);
  EXPECT_GE(yes.schedule.size(), 2u);
  EXPECT_TRUE(verify_schedule(dy.diagram(), quat.diagram(), yes.schedule));
  auto tampered = yes.schedule;
  tampered[1].t(0, 0) += 1;
  EXPECT_FALSE(verify_schedule(dy.diagram(), quat.diagram(), tampered));

  auto no = decide_weak(dy, tri);
  EXPECT_EQ(no.verdict, Verdict::No);
  EXPECT_EQ(no.witness, 2);
  auto fno = decide_weak(dy, fib);
  EXPECT_EQ(fno.verdict, Verdict::No);
  EXPECT_EQ(fno.witness, 2);
}

TEST(KConjugacy, DyadicQuaternaryLadder) {
  DimGroup dy(load_system("dyadic")), quat(load_system("quaternary"));
  auto r = decide_k_conjugacy(dy, quat);
  ASSERT_EQ(r.verdict, Verdict::Yes);
  ASSERT_TRUE(r.ladder);
  EXPECT_EQ(r.ladder->h[0], mat({{2}}));
  EXPECT_EQ(r.ladder->big_h[0], mat({{2}}));
  EXPECT_TRUE(verify_ladder(*r.ladder, dy.diagram(), quat.diagram()).ok);
  EXPECT_TRUE(ladder_is_periodic(*r.ladder, dy.diagram(), quat.diagram()));

  auto bad = *r.ladder;
  bad.big_h[0](0, 0) += 1;
  auto check = verify_ladder(bad, dy.diagram(), quat.diagram());
  EXPECT_FALSE(check.ok);
  EXPECT_EQ(check.broken, 0u);
}

TEST(KConjugacy, Obstructions) {
  DimGroup dy(load_system("dyadic")), tri(load_system("triadic")), fib(load_system("fibonacci"));
  auto r = decide_k_conjugacy(dy, tri);
  EXPECT_EQ(r.verdict, Verdict::No);
  ASSERT_FALSE(r.obstructions.empty());
  EXPECT_EQ(r.obstructions[0].kind, Obstruction::Kind::Spectra);
  EXPECT_EQ(r.obstructions[0].witness, 2);

  auto f = decide_k_conjugacy(fib, dy);
  EXPECT_EQ(f.verdict, Verdict::No);
  bool trace = false;
  for (const auto& o : f.obstructions) trace = trace || o.kind == Obstruction::Kind::TraceImage;
  EXPECT_TRUE(trace);
}

TEST(Ladder, IdentityBetweenIdenticalPresentations) {
  auto fib = load_system("fibonacci");
  IntMatrix id = mat({{1, 0}, {0, 1}});
  IntertwiningLadder l{{1}, {1}, {id}, {}};
  EXPECT_TRUE(verify_ladder(l, fib, fib).ok);
}

TEST(Ladder, ReflexiveSearch) {
  for (const char* name : {"dyadic", "fibonacci", "twotwo"}) {
    DimGroup g(load_system(name));
    auto r = decide_k_conjugacy(g, g);
    EXPECT_EQ(r.verdict, Verdict::Yes) << name;
  }
}

TEST(Tau, Examples) {
  DimGroup dy(load_system("dyadic")), quat(load_system("quaternary")), tri(load_system("triadic")),
      fib(load_system("fibonacci"));
  EXPECT_EQ(decide_tau(dy, quat).verdict, Verdict::Yes);
  auto no = decide_tau(dy, tri);
  EXPECT_EQ(no.verdict, Verdict::No);
  EXPECT_EQ(no.spectra.witness, 2);
  EXPECT_EQ(decide_tau(fib, fib).verdict, Verdict::Yes);
}

TEST(Hierarchy, ConsistentAndSymmetric) {
  std::vector<std::string> names{"dyadic", "triadic", "quaternary", "fibonacci"};
  for (const auto& x : names) {
    for (const auto& y : names) {
      DimGroup a(load_system(x)), b(load_system(y));
      auto k = decide_k_conjugacy(a, b).verdict;
      auto t = decide_tau(a, b).verdict;
      auto w = decide_weak(a, b).verdict;
      if (k == Verdict::Yes) EXPECT_NE(t, Verdict::No) << x << " " << y;
      if (t == Verdict::Yes) EXPECT_NE(w, Verdict::No) << x << " " << y;
      if (w == Verdict::No) EXPECT_NE(k, Verdict::Yes) << x << " " << y;
      EXPECT_EQ(decide_weak(b, a).verdict, w) << x << " " << y;
      EXPECT_EQ(decide_tau(b, a).verdict, t) << x << " " << y;
      EXPECT_EQ(decide_k_conjugacy(b, a).verdict, k) << x << " " << y;
    }
  }
}

TEST(Lift, Examples) {
  DimGroup dy(load_system("dyadic"));
  ClopenSet all = whole_space(dy.diagram(), 0);
  EXPECT_EQ(lift_class_under(dy, all, dy.unit(0), 5), all);
  EXPECT_EQ(lift_class_under(dy, floors(3, {1, 2, 3, 4, 5, 6}), DgElement{3, {3}}, 5), floors(3, {1, 2, 3}));
  EXPECT_THROW(lift_class_under(dy, floors(3, {1, 2}), DgElement{3, {3}}, 5), PreconditionError);
}

TEST(Lift, PartitionFromClasses) {
  DimGroup dy(load_system("dyadic"));
  auto one = partition_from_classes(dy, {dy.unit(0)}, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], whole_space(dy.diagram(), 0));
  auto two = partition_from_classes(dy, {DgElement{1, {1}}, DgElement{1, {1}}}, 5);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], floors(1, {1}));
  EXPECT_EQ(two[1], floors(1, {2}));
  EXPECT_THROW(partition_from_classes(dy, {DgElement{1, {3}}, DgElement{1, {-1}}}, 5), PreconditionError);
}

TEST(Lift, PartitionClassesAgreeMultiTower) {
  DimGroup g(load_system("twotwo"));
  std::vector<DgElement> xs{DgElement{2, {1, 0}}, DgElement{2, {0, 2}}};
  xs.push_back(g.difference(g.difference(g.unit(2), xs[0]), xs[1]));
  auto parts = partition_from_classes(g, xs, 8);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_EQ(g.equal(class_of_clopen(g.diagram(), parts[i]), xs[i], 8).verdict, Ternary::Yes);
}

TEST(PartitionHomeomorphism, Branches) {
  DimGroup dy(load_system("dyadic")), quat(load_system("quaternary"));
  std::vector<ClopenSet> blocks{floors(1, {1}), floors(1, {2})};
  auto id = partition_homeomorphism_from_hom(dy, blocks, dy, {DgElement{1, {1}}, DgElement{1, {1}}}, 5);
  EXPECT_TRUE(id.invertible);
  EXPECT_EQ(id.target, blocks);

  auto km = build_k0_morphism(dy, 1, quat, 1);
  ASSERT_EQ(km.status, K0MorphismResult::Status::Ok);
  std::vector<DgElement> images(2, DgElement{km.morphism.level_b, {km.morphism.t(0, 0)}});
  auto ph = partition_homeomorphism_from_hom(dy, blocks, quat, images, 5);
  EXPECT_TRUE(ph.invertible);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_EQ(quat.equal(class_of_clopen(quat.diagram(), ph.target[i]), images[i], 5).verdict, Ternary::Yes);

  auto degenerate = partition_homeomorphism_from_hom(dy, blocks, dy, {DgElement{1, {2}}, DgElement{1, {0}}}, 5);
  EXPECT_FALSE(degenerate.invertible);
  EXPECT_TRUE(degenerate.target[1].cells.empty());
}

TEST(Bezout, Examples) {
  DimGroup dy(load_system("dyadic")), fib(load_system("fibonacci")), tri(load_system("triadic"));
  auto a = bezout_lift({2}, dy, {}, 10);
  EXPECT_EQ(a.p, 2);
  ASSERT_EQ(a.h.size(), 1u);
  EXPECT_EQ(dy.equal(dy.sum(a.h[0], a.h[0]), dy.unit(0), 10).verdict, Ternary::Yes);
  EXPECT_EQ(a.h[0], a.f0);

  auto b = bezout_lift({2, 4}, dy, {}, 10);
  EXPECT_EQ(b.k, (std::vector<BigInt>{1, 2}));
  EXPECT_EQ(b.n, (std::vector<BigInt>{1, 0}));

  auto c = bezout_lift({1}, fib, {}, 10);
  EXPECT_EQ(fib.equal(c.h[0], fib.unit(0), 10).verdict, Ternary::Yes);

  EXPECT_THROW(bezout_lift({2}, tri, {}, 10), PreconditionError);
}

TEST(Resolution, Examples) {
  auto dy = load_system("dyadic"), quat = load_system("quaternary"), tri = load_system("triadic");
  auto self = conjugate_at_resolution(dy, dy, 2);
  EXPECT_TRUE(self.classes_agree);
  EXPECT_TRUE(self.check.ok()) << to_string(self.check.outcome);

  auto dq = conjugate_at_resolution(dy, quat, 2);
  EXPECT_TRUE(dq.classes_agree);
  EXPECT_TRUE(dq.check.ok()) << to_string(dq.check.outcome);
  EXPECT_TRUE(verify_conjugator(quat, dq.corrector.sigma, dq.blocks, dq.images, 2).ok());

  try {
    conjugate_at_resolution(dy, tri, 1);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "morphism");
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

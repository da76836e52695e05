#include "bvk/bratteli.hpp"
#include "bvk/errors.hpp"
#include "oracles.hpp"
#include "systems.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace bvk;
using bvk::testing::all_paths;
using bvk::testing::load_system;

namespace {

// Two consecutive transitions composed into one, keeping the edge order.
EdgeTable compose(const EdgeTable& lower, const EdgeTable& upper) {
  EdgeTable out(upper.size());
  for (std::size_t v = 0; v < upper.size(); ++v)
    for (std::size_t s : upper[v])
      for (std::size_t r : lower[s]) out[v].push_back(r);
  return out;
}

}  // namespace

TEST(Parse, DyadicIsOneVertexWithTwoEdges) {
  auto d = load_system("dyadic");
  EXPECT_TRUE(d.is_stationary());
  EXPECT_EQ(d.vertex_count(5), 1u);
  EXPECT_EQ(d.stationary_matrix(), IntMatrix::from_rows({{2}}));
}

TEST(Parse, FibonacciIncidence) {
  auto d = load_system("fibonacci");
  EXPECT_EQ(d.stationary_matrix(), IntMatrix::from_rows({{1, 1}, {1, 0}}));
}

TEST(Parse, DanglingSourceIsStructuralError) {
  EXPECT_THROW(parse_diagram(R"({"format":"obd-v1","kind":"stationary","vertices":2,)"
                             R"("root":[[0],[0]],"table":[[0,2],[0]]})"),
               StructuralError);
}

TEST(Parse, EmptyListIsStructuralError) {
  EXPECT_THROW(parse_diagram(R"({"format":"obd-v1","kind":"stationary","vertices":2,)"
                             R"("root":[[0],[0]],"table":[[0,1],[]]})"),
               StructuralError);
}

TEST(Parse, MissingOutgoingEdgeIsStructuralError) {
  EXPECT_THROW(parse_diagram(R"({"format":"obd-v1","kind":"stationary","vertices":2,)"
                             R"("root":[[0],[0]],"table":[[0],[0]]})"),
               StructuralError);
}

TEST(Parse, SyntaxErrorReportsPosition) {
  try {
    parse_diagram(R"({"format":"obd-v1", "kind": })");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 29u);
  }
}

TEST(Parse, CanonicalRoundTrip) {
  for (const char* name : {"dyadic", "fibonacci", "twotwo", "tribonacci_like", "explicit4"}) {
    auto d = load_system(name);
    std::string text = d.serialize();
    auto again = parse_diagram(text);
    EXPECT_EQ(again, d) << name;
    EXPECT_EQ(again.serialize(), text) << name;
  }
}

TEST(Parse, NonCanonicalInputNormalizes) {
  auto d = parse_diagram("{ \"vertices\": 1, \"kind\": \"stationary\", \"format\": \"obd-v1\",\n"
                         "  \"table\": [[0, 0]], \"root\": [[0, 0]] }");
  EXPECT_EQ(d.serialize(), R"({"format":"obd-v1","kind":"stationary","root":[[0,0]],"table":[[0,0]],"vertices":1})"
                           "\n");
}

TEST(Validate, Dyadic) {
  auto r = validate(load_system("dyadic"), 3);
  EXPECT_EQ(r.primitive, ValidationReport::Verdict::Yes);
  EXPECT_EQ(r.primitive_power, 1u);
  EXPECT_EQ(r.properly_ordered, ValidationReport::Verdict::Yes);
}

TEST(Validate, FibonacciCanonicalOrderHasTwoMaximalPaths) {
  auto d = load_system("fibonacci");
  auto r = validate(d, 5);
  EXPECT_EQ(r.primitive, ValidationReport::Verdict::Yes);
  EXPECT_EQ(r.primitive_power, 2u);
  // Oracle: the max paths to level 8 ending at each vertex, read backwards,
  // alternate between the two vertices, so two infinite max paths survive.
  Path p0 = max_path(d, 8, 0), p1 = max_path(d, 8, 1);
  for (std::size_t i = 1; i < 8; ++i) {
    EXPECT_NE(p0[i].target, p0[i - 1].target);
    EXPECT_NE(p1[i].target, p1[i - 1].target);
  }
  EXPECT_EQ(r.properly_ordered, ValidationReport::Verdict::No);
  EXPECT_NE(r.ordering_witness.find("max-edge"), std::string::npos);
  EXPECT_EQ(r.ordering_witness.find("min-edge"), std::string::npos);
}

TEST(Validate, BlockDiagonalIsNotPrimitive) {
  auto d = parse_diagram(R"({"format":"obd-v1","kind":"stationary","vertices":2,)"
                         R"("root":[[0],[0]],"table":[[0,0],[1,1]]})");
  auto r = validate(d, 4);
  EXPECT_EQ(r.primitive, ValidationReport::Verdict::No);
  EXPECT_FALSE(r.primitive_witness.empty());
}

TEST(Validate, ProperOrderTwoTwo) {
  auto r = validate(load_system("twotwo"), 4);
  EXPECT_EQ(r.properly_ordered, ValidationReport::Verdict::Yes);
}

TEST(Heights, Dyadic) {
  EXPECT_EQ(heights(load_system("dyadic"), 5), IntVector{32});
  EXPECT_EQ(heights(load_system("dyadic"), 0), IntVector{1});
  EXPECT_EQ(heights(load_system("dyadic"), 70), IntVector{BigInt(1) << 70});
}

TEST(Heights, FibonacciAgainstMatrixIteration) {
  auto d = load_system("fibonacci");
  IntMatrix a = IntMatrix::from_rows({{1, 1}, {1, 0}});
  IntVector h{1, 1};
  for (std::size_t m = 1; m <= 4; ++m) {
    EXPECT_EQ(heights(d, m), h);
    h = a * h;
  }
  EXPECT_EQ(heights(d, 4), (IntVector{5, 3}));
}

TEST(Heights, ExplicitPastLastLevel) {
  auto d = load_system("explicit4");
  EXPECT_NO_THROW(heights(d, 4));
  EXPECT_THROW(heights(d, 5), LevelOutOfRange);
}

TEST(Heights, TelescopingInvariance) {
  auto d = load_system("fibonacci");
  std::vector<EdgeTable> tables{compose(d.table(0), d.table(1))};
  for (int k = 0; k < 4; ++k) tables.push_back(compose(d.table(1), d.table(1)));
  auto t = OrderedBratteliDiagram::explicit_levels(tables);
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_EQ(heights(t, k), heights(d, 2 * k));
    EXPECT_EQ(cell_count(t, k), cell_count(d, 2 * k));
  }
}

TEST(Vershik, DyadicMinPathIncrementsLowestDigit) {
  auto d = load_system("dyadic");
  Path p = min_path(d, 3, 0);
  auto next = vershik_successor(d, p);
  ASSERT_TRUE(std::holds_alternative<Path>(next));
  Path q = std::get<Path>(next);
  EXPECT_EQ(q[0].position, 1u);
  EXPECT_EQ(q[1].position, 0u);
  EXPECT_EQ(q[2].position, 0u);
}

TEST(Vershik, DyadicMaxPathSignals) {
  auto d = load_system("dyadic");
  EXPECT_TRUE(std::holds_alternative<MaxPath>(vershik_successor(d, max_path(d, 3, 0))));
}

TEST(Vershik, SuccessorMatchesEnumeratedOrder) {
  for (const char* name : {"dyadic", "fibonacci", "twotwo", "explicit4"}) {
    auto d = load_system(name);
    for (std::size_t m = 1; m <= 4; ++m) {
      auto paths = all_paths(d, m);
      // Within a tower the successor is the next path ending at the same vertex.
      std::map<std::size_t, std::vector<Path>> by_end;
      for (const auto& p : paths) by_end[p.back().target].push_back(p);
      for (const auto& [v, list] : by_end) {
        for (std::size_t i = 0; i < list.size(); ++i) {
          auto s = vershik_successor(d, list[i]);
          EXPECT_EQ(floor_of(d, list[i]), BigInt(i + 1));
          EXPECT_EQ(path_of_cell(d, m, v, BigInt(i + 1)), list[i]);
          if (i + 1 < list.size()) {
            ASSERT_TRUE(std::holds_alternative<Path>(s)) << name;
            EXPECT_EQ(std::get<Path>(s), list[i + 1]) << name;
          } else {
            EXPECT_TRUE(std::holds_alternative<MaxPath>(s)) << name;
          }
        }
      }
    }
  }
}

TEST(Vershik, DyadicOrbitReachesMax) {
  auto d = load_system("dyadic");
  const std::size_t m = 7;
  Path p = min_path(d, m, 0);
  for (int i = 0; i < (1 << m) - 1; ++i) p = std::get<Path>(vershik_successor(d, p));
  EXPECT_EQ(p, max_path(d, m, 0));
}

TEST(TowerMap, DyadicRoofSplits) {
  auto d = load_system("dyadic");
  auto tm = tower_map(d, 1, 3);
  ASSERT_EQ(tm.roofs.size(), 1u);
  const auto& roof = tm.roofs[0];
  EXPECT_EQ(roof.cell, (Cell{0, 2}));
  ASSERT_EQ(roof.refinements.size(), 4u);
  int to_base = 0, unresolved = 0;
  for (const auto& [fine, img] : roof.refinements) {
    if (img) {
      EXPECT_EQ(*img, (Cell{0, 1}));
      ++to_base;
    } else {
      ++unresolved;
    }
  }
  EXPECT_EQ(to_base, 3);
  EXPECT_EQ(unresolved, 1);
  EXPECT_EQ(tm.unresolved, 1u);
}

TEST(TowerMap, FibonacciRoofRefinementsLandOnBases) {
  auto d = load_system("fibonacci");
  auto tm = tower_map(d, 1, 4);
  for (const auto& roof : tm.roofs)
    for (const auto& [fine, img] : roof.refinements)
      if (img) EXPECT_EQ(img->floor, 1u);
  // Oracle: path successor of each refinement, truncated to level 1.
  for (const auto& roof : tm.roofs) {
    for (const auto& [fine, img] : roof.refinements) {
      auto s = vershik_successor(d, path_of_cell(d, 4, fine.tower, BigInt(fine.floor)));
      if (std::holds_alternative<MaxPath>(s)) {
        EXPECT_FALSE(img.has_value());
      } else {
        Path q = std::get<Path>(s);
        q.resize(1);
        ASSERT_TRUE(img.has_value());
        EXPECT_EQ(img->tower, q[0].target);
      }
    }
  }
}

TEST(TowerMap, NonRoofFloorsIncrement) {
  auto d = load_system("fibonacci");
  auto h = heights(d, 3);
  for (std::size_t v = 0; v < h.size(); ++v)
    for (std::uint64_t k = 1; k < static_cast<std::uint64_t>(h[v]); ++k)
      EXPECT_EQ(cell_successor(d, 3, Cell{v, k}), (Cell{v, k + 1}));
}

TEST(TowerMap, RejectsLookaheadNotAboveLevel) {
  EXPECT_THROW(tower_map(load_system("dyadic"), 3, 3), PreconditionError);
}

TEST(Clopen, ClassOfWholeSpaceIsHeights) {
  auto d = load_system("fibonacci");
  for (std::size_t m = 0; m <= 5; ++m) EXPECT_EQ(class_of_clopen(d, whole_space(d, m)).vector, heights(d, m));
}

TEST(Clopen, DyadicCount) {
  auto d = load_system("dyadic");
  ClopenSet u{2, {Cell{0, 1}, Cell{0, 3}}};
  EXPECT_EQ(class_of_clopen(d, u), (DgElement{2, {2}}));
  EXPECT_EQ(class_of_clopen(d, ClopenSet{2, {}}).vector, IntVector{0});
}

TEST(Clopen, RefinementKeepsClassUpToPush) {
  auto d = load_system("fibonacci");
  ClopenSet u{2, {Cell{0, 1}, Cell{1, 1}}};
  ClopenSet r = refine(d, u, 4);
  EXPECT_EQ(class_of_clopen(d, r).vector, d.connecting(2, 4) * class_of_clopen(d, u).vector);
  for (const Cell& c : r.cells) EXPECT_TRUE(u.cells.count(project_cell(d, 4, c, 2)));
}

TEST(Clopen, AdditiveOnDisjointUnions) {
  auto d = load_system("twotwo");
  ClopenSet all = whole_space(d, 2);
  ClopenSet a{2, {}}, b{2, {}};
  int i = 0;
  for (const Cell& c : all.cells) (i++ % 3 == 0 ? a : b).cells.insert(c);
  EXPECT_EQ(class_of_clopen(d, a).vector + class_of_clopen(d, b).vector, class_of_clopen(d, all).vector);
}

TEST(Vershik, BijectionOffMaxAndMin) {
  for (const char* name : {"dyadic", "fibonacci", "twotwo"}) {
    auto d = load_system(name);
    for (std::size_t m = 1; m <= 6; ++m) {
      auto paths = all_paths(d, m);
      std::set<Path> images;
      std::size_t maxes = 0;
      for (const auto& p : paths) {
        auto s = vershik_successor(d, p);
        if (std::holds_alternative<MaxPath>(s)) {
          ++maxes;
        } else {
          EXPECT_TRUE(images.insert(std::get<Path>(s)).second);
        }
      }
      EXPECT_EQ(maxes, d.vertex_count(m));
      EXPECT_EQ(images.size() + d.vertex_count(m), paths.size());
    }
  }
}

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runtime limits are part of each criterion.

#include "bvk/certificate.hpp"
#include "bvk/cli.hpp"
#include "fullgroup_cases.hpp"
#include "oracles.hpp"
#include "systems.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bvk;
namespace tc = bvk::testing;

namespace {

const std::vector<std::string> kSystems{"dyadic",  "triadic",         "quaternary", "fibonacci",
                                        "twotwo",  "tribonacci_like", "allones",    "explicit4"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Fails the criterion with the first message; later failures are counted.
struct Tally {
  std::size_t checks = 0, failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) first = what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary + ", " + std::to_string(checks) + " checks"};
    return {false, std::to_string(failures) + "/" + std::to_string(checks) + " checks failed; first: " + first};
  }
};

// Certificates emitted by criteria 2-4, re-verified from disk by criterion 10.
std::vector<std::pair<std::string, std::string>> g_certificates;

void emit(const std::string& label, const nlohmann::json& cert) { g_certificates.emplace_back(label, certificate_text(cert)); }

Outcome combinatoric_exhaustive() {
  Tally t;
  std::size_t instances = 0;
  for (std::size_t n = 1; n <= 7; ++n) {
    auto solvable = tc::solvable_keys(n);
    tc::for_each_instance(n, [&](const BlockBijection& b) {
      ++instances;
      const bool brute = solvable.count(tc::instance_key(b)) > 0;
      auto family = block_condition_violation(b);
      if (!family) {
        t.expect(brute, "hypothesis holds but no cycle exists, n=" + std::to_string(n));
        t.expect(tc::is_single_cycle_respecting(b, cyclic_from_blocks(b)), "cycle invalid, n=" + std::to_string(n));
        return;
      }
      t.expect(!brute, "violation reported but a cycle exists, n=" + std::to_string(n));
      // The reported family must be a proper invariant union.
      std::set<std::size_t> lhs, rhs;
      for (std::size_t i : *family) {
        lhs.insert(b.p[i].begin(), b.p[i].end());
        rhs.insert(b.q[b.pi[i]].begin(), b.q[b.pi[i]].end());
      }
      t.expect(!family->empty() && family->size() < b.p.size() && lhs == rhs,
               "reported family is not a violation, n=" + std::to_string(n));
    });
  }
  return t.outcome(std::to_string(instances) + " instances, N <= 7");
}

Outcome conjugator_construction() {
  Tally t;
  std::mt19937 rng(20240611);
  std::size_t corruptions = 0;
  for (const char* name : {"dyadic", "fibonacci"}) {
    auto d = tc::load_system(name);
    DimGroup g(d);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t m = 1 + static_cast<std::size_t>(trial % 3);
      auto pc = tc::random_partition_case(d, m, rng);
      const std::string tag = std::string(name) + " trial " + std::to_string(trial);
      for (std::size_t i = 0; i < pc.blocks.size(); ++i)
        t.expect(g.equal(class_of_clopen(d, pc.blocks[i]), class_of_clopen(d, pc.images[i]), 40).verdict ==
                     Ternary::Yes,
                 tag + ": class mismatch");
      try {
        auto c = conjugator_from_partition(d, pc.blocks, pc.images, m + 10);
        auto check = verify_conjugator(d, c.sigma, pc.blocks, pc.images, 1);
        t.expect(check.ok(), tag + ": " + to_string(check.outcome));
        if (!check.ok()) continue;
        emit("conjugator " + tag, certify_conjugator(d, pc.blocks, pc.images, c.sigma, 1));
        for (std::size_t w = 0; w < c.sigma.r.size(); ++w) {
          for (std::size_t j = 0; j < c.sigma.r[w].size(); ++j) {
            FullGroupElement bad = c.sigma;
            bad.r[w][j] += 1;
            auto b = verify_conjugator(d, bad, pc.blocks, pc.images, 2);
            ++corruptions;
            t.expect(b.outcome == ConjugatorCheck::Outcome::NotBijective ||
                         b.outcome == ConjugatorCheck::Outcome::BlockMismatch,
                     tag + ": corruption undetected (" + to_string(b.outcome) + ")");
          }
        }
      } catch (const std::exception& e) {
        t.expect(false, tag + ": " + e.what());
      }
    }
  }
  return t.outcome("200 cases, " + std::to_string(corruptions) + " corruptions detected");
}

Outcome weak_verdicts() {
  Tally t;
  auto dy = tc::load_system("dyadic"), tri = tc::load_system("triadic"), fib = tc::load_system("fibonacci"),
       quat = tc::load_system("quaternary");
  ClassifyBounds bounds;
  auto no_tri = decide_weak(DimGroup(dy), DimGroup(tri), bounds);
  t.expect(no_tri.verdict == Verdict::No && no_tri.witness == 2, "dyadic/triadic is not Not(2)");
  emit("weak dyadic/triadic", certify_weak(dy, tri, no_tri, bounds));
  auto no_fib = decide_weak(DimGroup(dy), DimGroup(fib), bounds);
  t.expect(no_fib.verdict == Verdict::No && no_fib.witness == 2, "dyadic/fibonacci is not Not(2)");
  emit("weak dyadic/fibonacci", certify_weak(dy, fib, no_fib, bounds));
  auto yes = decide_weak(DimGroup(dy), DimGroup(quat), bounds);
  t.expect(yes.verdict == Verdict::Yes, "dyadic/quaternary not weakly conjugate");
  t.expect(verify_schedule(dy, quat, yes.schedule), "schedule does not verify");
  // verify_schedule checks alternation; at least one step each way.
  t.expect(yes.schedule.size() >= 2, "schedule is not two-directional");
  if (yes.verdict == Verdict::Yes) emit("weak dyadic/quaternary", certify_weak(dy, quat, yes, bounds));
  return t.outcome("schedule of " + std::to_string(yes.schedule.size()) + " morphisms");
}

Outcome k_conjugacy_verdicts() {
  Tally t;
  auto dy = tc::load_system("dyadic"), tri = tc::load_system("triadic"), fib = tc::load_system("fibonacci"),
       quat = tc::load_system("quaternary");
  ClassifyBounds bounds;
  auto yes = decide_k_conjugacy(DimGroup(dy), DimGroup(quat), bounds);
  t.expect(yes.verdict == Verdict::Yes && yes.ladder.has_value(), "dyadic/quaternary not K-conjugate");
  if (yes.ladder) {
    t.expect(verify_ladder(*yes.ladder, dy, quat).ok, "ladder does not verify");
    t.expect(ladder_is_periodic(*yes.ladder, dy, quat), "ladder is not periodic");
    emit("kconj dyadic/quaternary", certify_k_conjugacy(dy, quat, yes, bounds));
  }
  auto no_tri = decide_k_conjugacy(DimGroup(dy), DimGroup(tri), bounds);
  t.expect(no_tri.verdict == Verdict::No, "dyadic/triadic not Not");
  emit("kconj dyadic/triadic", certify_k_conjugacy(dy, tri, no_tri, bounds));
  auto no_fib = decide_k_conjugacy(DimGroup(fib), DimGroup(dy), bounds);
  bool trace = false;
  for (const auto& o : no_fib.obstructions) trace = trace || o.kind == Obstruction::Kind::TraceImage;
  t.expect(no_fib.verdict == Verdict::No && trace, "fibonacci/dyadic lacks a trace-image obstruction");
  emit("kconj fibonacci/dyadic", certify_k_conjugacy(fib, dy, no_fib, bounds));
  return t.outcome("ladder span " + std::to_string(yes.searched_span));
}

Outcome hierarchy() {
  Tally t;
  const std::vector<std::string> names{"dyadic", "triadic", "quaternary", "fibonacci"};
  std::size_t certified = 0;
  for (const auto& x : names) {
    for (const auto& y : names) {
      DimGroup a(tc::load_system(x)), b(tc::load_system(y));
      auto k = decide_k_conjugacy(a, b).verdict, tau = decide_tau(a, b).verdict, w = decide_weak(a, b).verdict;
      certified += (k != Verdict::Unknown) + (tau != Verdict::Unknown) + (w != Verdict::Unknown);
      const std::string pair = x + "/" + y;
      t.expect(!(k == Verdict::Yes && tau == Verdict::No), pair + ": K without tau");
      t.expect(!(tau == Verdict::Yes && w == Verdict::No), pair + ": tau without weak");
      t.expect(!(k == Verdict::Yes && w == Verdict::No), pair + ": K without weak");
      if (x == y) t.expect(k == Verdict::Yes && tau == Verdict::Yes && w == Verdict::Yes, pair + ": not reflexive");
    }
  }
  return t.outcome(std::to_string(certified) + "/48 verdicts certified");
}

Outcome dimgroup_oracle() {
  Tally t;
  std::mt19937 rng(60);
  std::uniform_int_distribution<int> coef(-9, 9);
  std::size_t decided = 0;
  for (int s = 0; s < 5; ++s) {
    DimGroup g(tc::random_primitive(rng, 2, 3));
    for (int i = 0; i < 100; ++i) {
      DgElement x{1 + static_cast<std::size_t>(rng() % 3), {}};
      for (std::size_t v = 0; v < g.diagram().vertex_count(x.level); ++v) x.vector.push_back(coef(rng));
      // Mix in elements that vanish under a push.
      if (i % 10 == 0) x = g.difference(g.push(x, x.level + 1), g.push(x, x.level + 1));
      auto oracle = tc::positivity_oracle(g, x, 20);
      if (oracle == Positivity::Unknown) continue;
      ++decided;
      const std::string tag = "system " + std::to_string(s) + " element " + std::to_string(i);
      t.expect(g.is_positive(x, 40).verdict == oracle, tag + ": positivity");
      t.expect((g.is_zero(x, 40).verdict == Ternary::Yes) == (oracle == Positivity::Zero), tag + ": zero");
    }
  }
  return t.outcome(std::to_string(decided) + "/500 decided by the oracle");
}

Outcome divisibility_oracle() {
  Tally t;
  std::size_t cycles = 0;
  for (const auto& name : kSystems) {
    auto d = tc::load_system(name);
    DimGroup g(d);
    const std::size_t oracle_depth = d.last_level() ? std::min<std::size_t>(30, *d.last_level()) : 30;
    for (int n = 1; n <= 64; ++n) {
      auto r = divides_unit(g, n, 40);
      const bool oracle = tc::divides_oracle(d, n, oracle_depth);
      const std::string tag = name + " n=" + std::to_string(n);
      if (d.is_stationary()) {
        t.expect(r.verdict == (oracle ? Ternary::Yes : Ternary::No), tag);
        if (r.verdict == Ternary::No) {
          t.expect(r.certificate && verify_residue_cycle(d, *r.certificate), tag + ": certificate");
          ++cycles;
        }
      } else {
        t.expect(oracle ? r.verdict == Ternary::Yes : r.verdict != Ternary::No, tag);
      }
    }
  }
  return t.outcome(std::to_string(kSystems.size()) + " systems, " + std::to_string(cycles) + " cycle certificates");
}

Outcome vershik() {
  Tally t;
  auto dy = tc::load_system("dyadic");
  for (std::size_t len = 1; len <= 12; ++len) {
    const std::uint64_t count = 1ull << len;
    for (std::uint64_t x = 0; x < count; ++x) {
      Path p;
      for (std::size_t i = 0; i < len; ++i) p.push_back(Edge{0, (x >> i) & 1});
      auto s = vershik_successor(dy, p);
      if (x + 1 == count) {
        t.expect(std::holds_alternative<MaxPath>(s), "all-ones path is not maximal");
        continue;
      }
      Path q;
      for (std::size_t i = 0; i < len; ++i) q.push_back(Edge{0, ((x + 1) >> i) & 1});
      t.expect(std::holds_alternative<Path>(s) && std::get<Path>(s) == q, "increment mismatch");
    }
  }
  for (const auto& name : kSystems) {
    auto d = tc::load_system(name);
    const std::size_t top = d.last_level() ? std::min<std::size_t>(6, *d.last_level()) : 6;
    for (std::size_t m = 1; m <= top; ++m) {
      auto paths = tc::all_paths(d, m);
      std::set<Path> images, mins;
      for (std::size_t v = 0; v < d.vertex_count(m); ++v) mins.insert(min_path(d, m, v));
      std::size_t maxes = 0;
      for (const auto& p : paths) {
        auto s = vershik_successor(d, p);
        if (std::holds_alternative<MaxPath>(s)) {
          ++maxes;
          continue;
        }
        const Path& q = std::get<Path>(s);
        t.expect(images.insert(q).second, name + ": successor not injective");
        t.expect(!mins.count(q), name + ": successor hits a minimal path");
      }
      t.expect(maxes == d.vertex_count(m), name + ": wrong number of maximal paths");
      t.expect(images.size() + mins.size() == paths.size(), name + ": successor not onto the non-minimal paths");
    }
  }
  return t.outcome("dyadic lengths <= 12, " + std::to_string(kSystems.size()) + " systems at levels <= 6");
}

Outcome frobenius_check() {
  Tally t;
  t.expect(frobenius({3, 5}) == 8, "frobenius(3,5) != 8");
  t.expect(!represent(7, {3, 5}).has_value(), "7 represented by (3,5)");
  std::mt19937 rng(9);
  int cases = 0;
  while (cases < 100) {
    std::vector<std::uint64_t> k(2 + rng() % 2);
    for (auto& x : k) x = 1 + rng() % 12;
    std::uint64_t g = 0;
    for (auto x : k) g = std::gcd(g, x);
    if (g != 1) continue;
    ++cases;
    std::vector<bool> reach(201, false);
    reach[0] = true;
    for (std::uint64_t x = 1; x <= 200; ++x)
      for (auto v : k)
        if (x >= v && reach[x - v]) reach[x] = true;
    std::uint64_t last_gap = 0;
    for (std::uint64_t x = 1; x <= 200; ++x)
      if (!reach[x]) last_gap = x;
    t.expect(frobenius(k) == last_gap + 1, "threshold mismatch");
    for (std::uint64_t d = 0; d <= 200; ++d) {
      auto r = represent(d, k);
      t.expect(r.has_value() == reach[d], "representability mismatch");
      if (r) {
        std::uint64_t sum = 0;
        for (std::size_t j = 0; j < k.size(); ++j) sum += (*r)[j] * k[j];
        t.expect(sum == d, "representation does not sum to d");
      }
    }
  }
  return t.outcome("100 random generator sets");
}

Outcome certificate_round_trip() {
  Tally t;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "bvk_acceptance_certs";
  fs::create_directories(dir);
  std::size_t mutations = 0, index = 0;
  for (const auto& [label, text] : g_certificates) {
    fs::path file = dir / ("cert" + std::to_string(index++) + ".json");
    {
      std::ofstream f(file, std::ios::binary);
      f << text;
    }
    std::ostringstream out, err;
    int status = cli::run({"verify", file.string()}, out, err);
    t.expect(status == 0, label + ": verify from disk failed: " + out.str());
    // Every byte of the witness payload, flipped in turn.
    // Keys are sorted, so the witness is the last member of the object.
    const std::size_t begin = text.find("\"witness\"");
    const std::size_t end = text.rfind('}');
    t.expect(begin != std::string::npos && begin < end, label + ": witness not found");
    for (std::size_t i = begin; i < end; ++i) {
      std::string bad = text;
      bad[i] = static_cast<char>(bad[i] ^ 0x01);
      ++mutations;
      t.expect(!verify_certificate(bad).ok, label + ": mutation at byte " + std::to_string(i) + " accepted");
    }
    // Spot-check the mutated files through the CLI as well.
    std::string bad = text;
    bad[(begin + end) / 2] ^= 0x01;
    {
      std::ofstream f(file, std::ios::binary);
      f << bad;
    }
    std::ostringstream out2, err2;
    t.expect(cli::run({"verify", file.string()}, out2, err2) != 0, label + ": tampered file accepted by verify");
  }
  fs::remove_all(dir);
  return t.outcome(std::to_string(g_certificates.size()) + " certificates, " + std::to_string(mutations) +
                   " single-byte mutations rejected");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "block-bijection cycles, exhaustive N <= 7", 60, combinatoric_exhaustive},
      {2, "conjugator construction on dyadic and Fibonacci", 120, conjugator_construction},
      {3, "weak conjugacy verdicts", 5, weak_verdicts},
      {4, "K-conjugacy verdicts", 30, k_conjugacy_verdicts},
      {5, "hierarchy consistency over 4x4 systems", 30, hierarchy},
      {6, "dimension-group order vs push-forward oracle", 60, dimgroup_oracle},
      {7, "divisibility vs gcd-chain oracle", 30, divisibility_oracle},
      {8, "Vershik successor", 30, vershik},
      {9, "Frobenius threshold and representation", 10, frobenius_check},
      {10, "certificate round trip and tamper detection", 10, certificate_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > c.limit_s) {
      o.pass = false;
      o.detail += "; exceeded the time limit";
    }
    failed += !o.pass;
    std::printf("%s criterion %2d: %s (%.2fs / %.0fs) - %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limit_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

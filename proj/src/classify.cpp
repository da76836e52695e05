#include "bvk/classify.hpp"

#include "bvk/errors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace bvk {

namespace {

constexpr std::uint64_t kMaxRepresentTarget = 10000000;
constexpr std::size_t kMaxLadderWork = 5000000;

IntVector times(const IntMatrix& m, const IntVector& v) { return m * v; }

// All nonnegative integer x with sum_j x_j w_j = target, lexicographic.
void solutions(const std::vector<BigInt>& w, const BigInt& target, std::vector<IntVector>& out, std::size_t cap) {
  IntVector x(w.size());
  std::function<void(std::size_t, BigInt)> rec = [&](std::size_t j, BigInt rest) {
    if (out.size() >= cap) return;
    if (j + 1 == w.size()) {
      if (rest % w[j] == 0) {
        x[j] = rest / w[j];
        out.push_back(x);
      }
      return;
    }
    for (BigInt v = 0; v * w[j] <= rest; ++v) {
      x[j] = v;
      rec(j + 1, rest - v * w[j]);
      if (out.size() >= cap) return;
    }
  };
  if (w.empty()) {
    if (target == 0) out.push_back({});
    return;
  }
  rec(0, target);
}

IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

DgElement counts_of(const OrderedBratteliDiagram& d, const ClopenSet& u) { return class_of_clopen(d, u); }

std::optional<IntertwiningLadder> search_ladder(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b,
                                                std::size_t max_span, std::size_t& searched) {
  std::size_t work = 0;
  const std::size_t ra = a.vertex_count(1), rb = b.vertex_count(1);
  for (std::size_t span = 2; span <= max_span; ++span) {
    searched = span;
    for (std::size_t s = 1; s < span; ++s) {
      const std::size_t t = span - s;
      for (std::size_t a0 = 1; a0 <= 2; ++a0) {
        for (std::size_t b0 = 1; b0 <= 2; ++b0) {
          IntVector ha = a.heights(a0), hb = b.heights(b0), ha1 = a.heights(a0 + s);
          IntMatrix as = a.connecting(a0, a0 + s), bt = b.connecting(b0, b0 + t);
          // Candidate rows of h and of H.
          std::vector<std::vector<IntVector>> hrows(rb), grows(ra);
          bool feasible = true;
          for (std::size_t i = 0; i < rb && feasible; ++i) {
            solutions(ha, hb[i], hrows[i], 20000);
            feasible = !hrows[i].empty();
          }
          for (std::size_t k = 0; k < ra && feasible; ++k) {
            solutions(hb, ha1[k], grows[k], 20000);
            feasible = !grows[k].empty();
          }
          if (!feasible) continue;
          std::vector<std::size_t> pick(rb, 0);
          for (;;) {
            if (++work > kMaxLadderWork) return std::nullopt;
            std::vector<IntVector> rows;
            for (std::size_t i = 0; i < rb; ++i) rows.push_back(hrows[i][pick[i]]);
            IntMatrix h = from_rows(rows, ra);
            // Row k of H must satisfy y h = row k of A^s.
            std::vector<IntVector> hk;
            bool ok = true;
            for (std::size_t k = 0; k < ra && ok; ++k) {
              ok = false;
              for (const auto& y : grows[k]) {
                ++work;
                IntVector yh(ra);
                for (std::size_t j = 0; j < ra; ++j)
                  for (std::size_t i = 0; i < rb; ++i) yh[j] += y[i] * h(i, j);
                bool match = true;
                for (std::size_t j = 0; j < ra && match; ++j) match = yh[j] == as(k, j);
                if (match) {
                  hk.push_back(y);
                  ok = true;
                  break;
                }
              }
            }
            if (ok) {
              IntMatrix big = from_rows(hk, rb);
              if (h * big == bt) {
                return IntertwiningLadder{{a0, a0 + s}, {b0, b0 + t}, {h, h}, {big}};
              }
            }
            std::size_t i = 0;
            while (i < rb && ++pick[i] == hrows[i].size()) pick[i++] = 0;
            if (i == rb) break;
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::uint64_t frobenius(const std::vector<std::uint64_t>& k) {
  if (k.empty()) throw PreconditionError("frobenius needs at least one generator");
  std::uint64_t g = 0;
  for (auto x : k) {
    if (x == 0) throw PreconditionError("generators must be positive");
    g = std::gcd(g, x);
  }
  if (g != 1) throw PreconditionError("generators are not coprime");
  const std::uint64_t a = *std::min_element(k.begin(), k.end());
  if (a > 10000000) throw CapabilityError("smallest generator too large");
  // Least representable value in each residue class mod a.
  constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> dist(a, inf);
  dist[0] = 0;
  using Item = std::pair<std::uint64_t, std::uint64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0, 0);
  while (!pq.empty()) {
    auto [dv, r] = pq.top();
    pq.pop();
    if (dv != dist[r]) continue;
    for (auto x : k) {
      std::uint64_t nd = dv + x, nr = (r + x) % a;
      if (nd < dist[nr]) {
        dist[nr] = nd;
        pq.emplace(nd, nr);
      }
    }
  }
  std::uint64_t worst = *std::max_element(dist.begin(), dist.end());
  // Largest non-representable is worst - a; the threshold is one more.
  return worst >= a ? worst - a + 1 : 1;
}

std::optional<std::vector<std::uint64_t>> represent(std::uint64_t d, const std::vector<std::uint64_t>& k) {
  if (d > kMaxRepresentTarget) throw CapabilityError("target too large to represent");
  const std::size_t r = k.size();
  // reach[j][x]: x is a nonnegative combination of k[j..].
  std::vector<std::vector<bool>> reach(r + 1, std::vector<bool>(d + 1, false));
  reach[r][0] = true;
  for (std::size_t j = r; j-- > 0;) {
    if (k[j] == 0) throw PreconditionError("generators must be positive");
    for (std::uint64_t x = 0; x <= d; ++x) reach[j][x] = reach[j + 1][x] || (x >= k[j] && reach[j][x - k[j]]);
  }
  if (!reach[0][d]) return std::nullopt;
  std::vector<std::uint64_t> out(r, 0);
  std::uint64_t rest = d;
  for (std::size_t j = 0; j < r; ++j) {
    std::uint64_t n = 0;
    while (!reach[j + 1][rest - n * k[j]]) ++n;
    out[j] = n;
    rest -= n * k[j];
  }
  return out;
}

K0MorphismResult build_k0_morphism(const DimGroup& a, std::size_t level_a, const DimGroup& b, std::size_t level_b,
                                   const ClassifyBounds& bounds) {
  K0MorphismResult out;
  IntVector ha = a.diagram().heights(level_a);
  BigInt p = gcd_of(ha);
  std::vector<std::uint64_t> k;
  for (const auto& x : ha) k.push_back(to_u64(x / p, "height ratio"));
  auto div = divides_unit(b, p, bounds.depth);
  if (div.verdict == Ternary::No) {
    out.status = K0MorphismResult::Status::Obstruction;
    out.obstruction = p;
    out.certificate = div.certificate;
    return out;
  }
  if (div.verdict == Ternary::Unknown) return out;
  const std::size_t start = std::max(level_b, div.level);
  const auto last = b.diagram().last_level();
  for (std::size_t level = start; level <= start + bounds.max_level; ++level) {
    if (last && level > *last) break;
    IntVector hb = b.diagram().heights(level);
    std::vector<std::vector<std::uint64_t>> rows;
    bool ok = true;
    for (const auto& x : hb) {
      BigInt q = x / p;
      if (q > kMaxRepresentTarget) throw CapabilityError("heights too large to represent");
      auto rep = represent(static_cast<std::uint64_t>(q), k);
      if (!rep) {
        ok = false;
        break;
      }
      rows.push_back(*rep);
    }
    if (!ok) continue;
    IntMatrix t(hb.size(), ha.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < ha.size(); ++j) t(i, j) = BigInt(rows[i][j]);
    out.status = K0MorphismResult::Status::Ok;
    out.morphism = K0Morphism{level_a, level, t, p};
    return out;
  }
  return out;
}

bool verify_k0_morphism(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const K0Morphism& m) {
  IntVector ha = a.heights(m.level_a), hb = b.heights(m.level_b);
  if (m.t.rows() != hb.size() || m.t.cols() != ha.size()) return false;
  return m.t.is_nonnegative() && times(m.t, ha) == hb;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

WeakResult decide_weak(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds) {
  WeakResult out;
  out.spectra = spectra_equal(a, b, bounds.spectrum());
  if (out.spectra.verdict == SpectraComparison::Verdict::Distinct) {
    out.verdict = Verdict::No;
    out.witness = out.spectra.witness;
    out.witness_in_first = out.spectra.witness_in_first;
    return out;
  }
  if (out.spectra.verdict == SpectraComparison::Verdict::Unknown) return out;
  // Alternate directions, each step starting where the previous one ended.
  std::size_t la = 1, lb = 1;
  for (int round = 0; round < 2; ++round) {
    auto ab = build_k0_morphism(a, la, b, lb, bounds);
    if (ab.status != K0MorphismResult::Status::Ok) return out;
    out.schedule.push_back(ab.morphism);
    auto ba = build_k0_morphism(b, ab.morphism.level_b, a, la + 1, bounds);
    if (ba.status != K0MorphismResult::Status::Ok) return out;
    out.schedule.push_back(ba.morphism);
    la = ba.morphism.level_b;
    lb = ab.morphism.level_b + 1;
  }
  out.verdict = Verdict::Yes;
  return out;
}

bool verify_schedule(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b,
                     const std::vector<K0Morphism>& schedule) {
  if (schedule.size() < 2) return false;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const bool forward = i % 2 == 0;
    const K0Morphism& m = schedule[i];
    if (!verify_k0_morphism(forward ? a : b, forward ? b : a, m)) return false;
    if (i > 0 && m.level_a != schedule[i - 1].level_b) return false;
    if (i > 1 && m.level_b <= schedule[i - 2].level_b) return false;
  }
  return true;
}

LadderCheck verify_ladder(const IntertwiningLadder& l, const OrderedBratteliDiagram& a,
                          const OrderedBratteliDiagram& b) {
  const std::size_t n = l.h.size();
  auto fail = [](std::size_t i, std::string why) { return LadderCheck{false, i, std::move(why)}; };
  if (n == 0 || l.levels_a.size() != n || l.levels_b.size() != n || l.big_h.size() + 1 != n)
    return fail(0, "ladder shape");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t la = l.levels_a[i], lb = l.levels_b[i];
    const IntMatrix& h = l.h[i];
    const std::size_t sq = i == 0 ? 0 : 2 * i - 1;
    if (h.rows() != b.vertex_count(lb) || h.cols() != a.vertex_count(la)) return fail(sq, "h shape");
    if (!h.is_nonnegative()) return fail(sq, "h not positive");
    if (times(h, a.heights(la)) != b.heights(lb)) return fail(sq, "h does not preserve the unit");
    if (i + 1 == n) break;
    const std::size_t la1 = l.levels_a[i + 1], lb1 = l.levels_b[i + 1];
    if (la1 < la || lb1 < lb) return fail(2 * i, "levels decrease");
    const IntMatrix& big = l.big_h[i];
    if (big.rows() != a.vertex_count(la1) || big.cols() != b.vertex_count(lb)) return fail(2 * i, "H shape");
    if (!big.is_nonnegative()) return fail(2 * i, "H not positive");
    if (times(big, b.heights(lb)) != a.heights(la1)) return fail(2 * i, "H does not preserve the unit");
    if (!(big * h == a.connecting(la, la1))) return fail(2 * i, "H h differs from the A connecting map");
    if (l.h[i + 1].cols() != big.rows() || !(l.h[i + 1] * big == b.connecting(lb, lb1)))
      return fail(2 * i + 1, "h H differs from the B connecting map");
  }
  return LadderCheck{true, 0, ""};
}

bool ladder_is_periodic(const IntertwiningLadder& l, const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b) {
  return a.is_stationary() && b.is_stationary() && l.h.size() == 2 && l.h[0] == l.h[1] && l.levels_a[0] >= 1 &&
         l.levels_b[0] >= 1 && verify_ladder(l, a, b).ok;
}

std::string to_string(Obstruction::Kind k) {
  switch (k) {
    case Obstruction::Kind::Spectra: return "spectra";
    case Obstruction::Kind::RationalRank: return "rational-rank";
    default: return "trace-image";
  }
}

namespace {

std::vector<Obstruction> obstructions(const DimGroup& a, const DimGroup& b, const SpectraComparison& spectra,
                                      Ternary& traces) {
  std::vector<Obstruction> out;
  if (spectra.verdict == SpectraComparison::Verdict::Distinct) {
    out.push_back({Obstruction::Kind::Spectra,
                   "n = " + spectra.witness.str() + " divides the unit only in the " +
                       (spectra.witness_in_first ? "first" : "second") + " system",
                   spectra.witness});
  }
  auto rank_a = a.rational_rank(), rank_b = b.rational_rank();
  if (rank_a && rank_b && *rank_a != *rank_b) {
    out.push_back({Obstruction::Kind::RationalRank,
                   "rational ranks " + std::to_string(*rank_a) + " and " + std::to_string(*rank_b), 0});
  }
  traces = Ternary::Unknown;
  if (a.primitive_stationary() && b.primitive_stationary()) {
    try {
      auto ta = trace_image_group(a), tb = trace_image_group(b);
      traces = trace_images_isomorphic(ta, tb);
      if (traces == Ternary::No) {
        auto describe = [](const TraceImageGroup& g) {
          if (g.kind != TraceImageGroup::Kind::Rational) return "degree " + std::to_string(g.field.degree());
          std::string inverted, finite;
          for (const auto& [q, e] : g.denominator) {
            if (e) finite += (finite.empty() ? "" : "*") + q.str() + "^" + std::to_string(*e);
            else inverted += (inverted.empty() ? "" : ",") + ("1/" + q.str());
          }
          std::string s = inverted.empty() ? "Z" : "Z[" + inverted + "]";
          return finite.empty() ? s : s + " with denominators " + finite;
        };
        out.push_back({Obstruction::Kind::TraceImage,
                       "trace images differ (" + describe(ta) + " vs " + describe(tb) + ")", 0});
      }
    } catch (const Error&) {
      traces = Ternary::Unknown;
    }
  }
  return out;
}

}  // namespace

KConjugacyResult decide_k_conjugacy(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds) {
  KConjugacyResult out;
  Ternary traces;
  out.obstructions = obstructions(a, b, spectra_equal(a, b, bounds.spectrum()), traces);
  if (!out.obstructions.empty()) {
    out.verdict = Verdict::No;
    return out;
  }
  if (!a.diagram().is_stationary() || !b.diagram().is_stationary()) return out;
  out.ladder = search_ladder(a.diagram(), b.diagram(), bounds.ladder_span, out.searched_span);
  if (out.ladder && ladder_is_periodic(*out.ladder, a.diagram(), b.diagram())) {
    out.verdict = Verdict::Yes;
  } else {
    out.ladder.reset();
  }
  return out;
}

TauResult decide_tau(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds) {
  TauResult out;
  out.spectra = spectra_equal(a, b, bounds.spectrum());
  auto all = obstructions(a, b, out.spectra, out.trace_images);
  for (auto& o : all)
    if (o.kind != Obstruction::Kind::RationalRank) out.obstructions.push_back(std::move(o));
  if (!out.obstructions.empty()) {
    out.verdict = Verdict::No;
  } else if (out.spectra.verdict == SpectraComparison::Verdict::Equal && out.trace_images == Ternary::Yes) {
    out.verdict = Verdict::Yes;
  }
  return out;
}

ClopenSet lift_class_under(const DimGroup& g, const ClopenSet& u, const DgElement& x, std::size_t depth) {
  const OrderedBratteliDiagram& d = g.diagram();
  auto px = g.is_positive(x, depth).verdict;
  if (px == Positivity::Zero) return ClopenSet{u.level, {}};
  if (px != Positivity::Positive) throw PreconditionError("class to lift is not positive");
  DgElement cu = counts_of(d, u);
  auto rest = g.is_positive(g.difference(cu, x), depth).verdict;
  if (rest != Positivity::Positive && rest != Positivity::Zero)
    throw PreconditionError("class exceeds the class of the set");
  const std::size_t start = std::max(u.level, x.level);
  for (std::size_t level = start; level <= start + depth; ++level) {
    if (d.last_level() && level > *d.last_level()) break;
    IntVector r = g.push(x, level).vector;
    ClopenSet fine = refine(d, u, level);
    IntVector c = counts_of(d, fine).vector;
    bool fits = true;
    for (std::size_t w = 0; w < r.size() && fits; ++w) fits = r[w] >= 0 && r[w] <= c[w];
    if (!fits) continue;
    ClopenSet q{level, {}};
    std::vector<BigInt> taken(r.size(), 0);
    for (const Cell& cell : fine.cells) {  // ascending floors within each tower
      if (taken[cell.tower] < r[cell.tower]) {
        q.cells.insert(cell);
        taken[cell.tower] += 1;
      }
    }
    return q;
  }
  throw CapabilityError("no level within depth " + std::to_string(depth) + " admits the class");
}

std::vector<ClopenSet> partition_from_classes(const DimGroup& g, const std::vector<DgElement>& xs, std::size_t depth) {
  if (xs.empty()) throw PreconditionError("no classes given");
  const OrderedBratteliDiagram& d = g.diagram();
  DgElement total = xs[0];
  for (const auto& x : xs) {
    auto v = g.is_positive(x, depth).verdict;
    if (v != Positivity::Positive && v != Positivity::Zero) throw PreconditionError("classes must be positive or zero");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) total = g.sum(total, xs[i]);
  if (g.equal(total, g.unit(0), depth).verdict != Ternary::Yes) throw PreconditionError("classes do not sum to the unit");
  std::vector<ClopenSet> out;
  ClopenSet rest = whole_space(d, 0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    ClopenSet q = lift_class_under(g, rest, xs[i], depth);
    rest = refine(d, rest, q.level);
    for (const Cell& c : q.cells) rest.cells.erase(c);
    out.push_back(std::move(q));
  }
  out.push_back(rest);
  return out;
}

PartitionHomeomorphism partition_homeomorphism_from_hom(const DimGroup& a, const std::vector<ClopenSet>& blocks,
                                                        const DimGroup& b, const std::vector<DgElement>& images,
                                                        std::size_t depth) {
  if (blocks.size() != images.size()) throw PreconditionError("need one image per block");
  (void)a;
  PartitionHomeomorphism out;
  out.source = blocks;
  for (const auto& x : images) {
    if (b.is_positive(x, depth).verdict != Positivity::Positive) out.invertible = false;
  }
  out.target = partition_from_classes(b, images, depth);
  return out;
}

BezoutLift bezout_lift(const IntVector& f1, const DimGroup& target, std::vector<DgElement> preimages,
                       std::size_t depth) {
  if (f1.empty() || !all_nonnegative(f1) || all_zero(f1)) throw PreconditionError("unit must be a nonzero positive vector");
  BezoutLift out;
  out.p = gcd_of(f1);
  for (const auto& m : f1) out.k.push_back(m / out.p);
  // Extended Euclid folded over the k_i.
  auto xgcd = [](BigInt x, BigInt y) {
    BigInt a0 = 1, b0 = 0, a1 = 0, b1 = 1;
    while (y != 0) {
      BigInt q = x / y;
      BigInt r = x - q * y, a2 = a0 - q * a1, b2 = b0 - q * b1;
      x = y, y = r, a0 = a1, a1 = a2, b0 = b1, b1 = b2;
    }
    return std::make_tuple(x, a0, b0);
  };
  out.n.assign(out.k.size(), 0);
  BigInt g = out.k[0];
  out.n[0] = 1;
  for (std::size_t i = 1; i < out.k.size(); ++i) {
    auto [gg, x, y] = xgcd(g, out.k[i]);
    for (std::size_t j = 0; j < i; ++j) out.n[j] *= x;
    out.n[i] = y;
    g = gg;
  }
  auto div = divides_unit(target, out.p, depth);
  if (div.verdict == Ternary::No) throw PreconditionError(out.p.str() + " does not divide the unit of the target");
  if (div.verdict == Ternary::Unknown) throw CapabilityError("divisibility undecided within depth");
  const OrderedBratteliDiagram& d = target.diagram();
  if (preimages.empty()) preimages.assign(f1.size(), DgElement{0, IntVector(d.vertex_count(0))});
  if (preimages.size() != f1.size()) throw PreconditionError("need one preimage per generator");
  std::size_t level = div.level;
  for (const auto& gi : preimages) level = std::max(level, gi.level);
  for (auto& gi : preimages) gi = target.push(gi, level);
  IntVector f0 = d.heights(level);
  for (auto& x : f0) x /= out.p;
  out.f0 = DgElement{level, f0};
  IntVector f00 = scaled(f0, -1);
  for (std::size_t i = 0; i < f1.size(); ++i) f00 = f00 + scaled(preimages[i].vector, out.k[i]);
  IntVector image(d.vertex_count(level));
  for (std::size_t i = 0; i < f1.size(); ++i) {
    out.h.push_back(DgElement{level, preimages[i].vector - scaled(f00, out.n[i])});
    image = image + scaled(out.h.back().vector, f1[i]);
  }
  if (image != d.heights(level)) throw std::logic_error("lift does not preserve the unit");
  return out;
}

ResolutionReport conjugate_at_resolution(const OrderedBratteliDiagram& da, const OrderedBratteliDiagram& db,
                                         std::size_t m, const ClassifyBounds& bounds) {
  DimGroup a(da), b(db);
  ResolutionReport out;
  auto km = build_k0_morphism(a, m, b, 1, bounds);
  if (km.status == K0MorphismResult::Status::Obstruction)
    throw StageError("morphism", "obstruction " + km.obstruction.str());
  if (km.status != K0MorphismResult::Status::Ok) throw StageError("morphism", "no morphism within the level bound");
  out.morphism = km.morphism;

  // σ on the level-m cells of A, one block per cell.
  ClopenSet all = whole_space(da, m);
  std::vector<Cell> cells(all.cells.begin(), all.cells.end());
  std::vector<ClopenSet> a_blocks;
  std::vector<DgElement> images;
  for (const Cell& c : cells) {
    a_blocks.push_back(ClopenSet{m, {c}});
    IntVector col(km.morphism.t.rows());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = km.morphism.t(i, c.tower);
    images.push_back(DgElement{km.morphism.level_b, col});
  }
  try {
    out.sigma = partition_homeomorphism_from_hom(a, a_blocks, b, images, bounds.depth);
  } catch (const Error& e) {
    throw StageError("partition", e.what());
  }
  if (!out.sigma.invertible) throw StageError("partition", "a cell has zero image");

  // Blocks on B: σ of each non-roof cell and σ of the union of roofs; their
  // images: σ of the next cell and σ of the union of bases.
  IntVector h = da.heights(m);
  std::size_t level = 0;
  for (const auto& t : out.sigma.target) level = std::max(level, t.level);
  auto sigma_of = [&](const std::vector<std::size_t>& idx) {
    ClopenSet u{level, {}};
    for (std::size_t i : idx)
      for (const Cell& c : refine(db, out.sigma.target[i], level).cells) u.cells.insert(c);
    return u;
  };
  auto index_of = [&](const Cell& c) {
    return static_cast<std::size_t>(std::lower_bound(cells.begin(), cells.end(), c) - cells.begin());
  };
  std::vector<std::size_t> roofs, bases;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    if (BigInt(c.floor) == h[c.tower]) {
      roofs.push_back(i);
    } else {
      out.blocks.push_back(sigma_of({i}));
      out.images.push_back(sigma_of({index_of(Cell{c.tower, c.floor + 1})}));
    }
    if (c.floor == 1) bases.push_back(i);
  }
  out.blocks.push_back(sigma_of(roofs));
  out.images.push_back(sigma_of(bases));

  out.classes_agree = true;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    if (b.equal(class_of_clopen(db, out.blocks[i]), class_of_clopen(db, out.images[i]), bounds.depth).verdict !=
        Ternary::Yes)
      out.classes_agree = false;
  }
  if (!out.classes_agree) throw StageError("transport", "classes of transported blocks differ");
  try {
    out.corrector = conjugator_from_partition(db, out.blocks, out.images, level + bounds.max_level);
  } catch (const Error& e) {
    throw StageError("corrector", e.what());
  }
  out.check = verify_conjugator(db, out.corrector.sigma, out.blocks, out.images, 1);
  return out;
}

}  // namespace bvk

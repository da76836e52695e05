#include "bvk/fullgroup.hpp"

#include "bvk/dimgroup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bvk {

using nlohmann::json;

namespace {

// Bit set over {1..n}; unions of disjoint blocks are XORs.
using Mask = std::vector<std::uint64_t>;

Mask mask_of(const std::vector<std::size_t>& block, std::size_t n) {
  Mask m((n + 64) / 64, 0);
  for (std::size_t x : block) m[x / 64] ^= std::uint64_t{1} << (x % 64);
  return m;
}

void xor_into(Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

std::vector<std::vector<std::size_t>> cycles_of(const std::vector<std::size_t>& sigma) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(sigma.size() + 1, false);
  for (std::size_t i = 1; i <= sigma.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> c;
    for (std::size_t x = i; !seen[x]; x = sigma[x - 1]) {
      seen[x] = true;
      c.push_back(x);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::uint64_t> heights_u64(const OrderedBratteliDiagram& d, std::size_t m) {
  std::vector<std::uint64_t> out;
  for (const auto& h : d.heights(m)) out.push_back(to_u64(h, "tower height"));
  return out;
}

// Cell -> index of the set containing it, for sets refined to `level`.
std::map<Cell, std::size_t> label_cells(const OrderedBratteliDiagram& d, const std::vector<ClopenSet>& sets,
                                        std::size_t level, const char* what) {
  std::map<Cell, std::size_t> label;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const Cell& c : refine(d, sets[i], level).cells) {
      if (!label.emplace(c, i).second) throw PreconditionError(std::string(what) + " overlap");
    }
  }
  if (label.size() != cell_count(d, level)) throw PreconditionError(std::string(what) + " do not cover the space");
  return label;
}

std::size_t max_level(const std::vector<ClopenSet>& a, const std::vector<ClopenSet>& b) {
  std::size_t m = 0;
  for (const auto& u : a) m = std::max(m, u.level);
  for (const auto& u : b) m = std::max(m, u.level);
  return m;
}

}  // namespace

void check_block_bijection(const BlockBijection& b) {
  auto check_partition = [&](const std::vector<std::vector<std::size_t>>& blocks, const char* name) {
    std::vector<bool> seen(b.n + 1, false);
    std::size_t total = 0;
    for (const auto& u : blocks) {
      if (u.empty()) throw PreconditionError(std::string(name) + " has an empty block");
      for (std::size_t x : u) {
        if (x < 1 || x > b.n || seen[x]) throw PreconditionError(std::string(name) + " is not a partition");
        seen[x] = true;
        ++total;
      }
    }
    if (total != b.n) throw PreconditionError(std::string(name) + " does not cover {1..n}");
  };
  check_partition(b.p, "P");
  check_partition(b.q, "Q");
  if (b.p.size() != b.q.size() || b.pi.size() != b.p.size())
    throw PreconditionError("block map is not a bijection");
  std::vector<bool> hit(b.q.size(), false);
  for (std::size_t i = 0; i < b.pi.size(); ++i) {
    if (b.pi[i] >= b.q.size() || hit[b.pi[i]]) throw PreconditionError("block map is not a bijection");
    hit[b.pi[i]] = true;
    if (b.p[i].size() != b.q[b.pi[i]].size()) throw PreconditionError("block sizes do not match");
  }
}

std::optional<std::vector<std::size_t>> block_condition_violation(const BlockBijection& b) {
  check_block_bijection(b);
  const std::size_t k = b.p.size();
  if (k > kMaxBlocks) throw PreconditionError("more than " + std::to_string(kMaxBlocks) + " blocks");
  std::vector<Mask> pm, qm;
  for (std::size_t i = 0; i < k; ++i) {
    pm.push_back(mask_of(b.p[i], b.n));
    qm.push_back(mask_of(b.q[b.pi[i]], b.n));
  }
  Mask up((b.n + 64) / 64, 0), uq = up;
  std::vector<std::size_t> family;
  // Depth-first pre-order visits index lists in lexicographic order.
  auto dfs = [&](auto&& self, std::size_t start) -> bool {
    for (std::size_t i = start; i < k; ++i) {
      family.push_back(i);
      xor_into(up, pm[i]);
      xor_into(uq, qm[i]);
      if (family.size() < k && up == uq) return true;
      if (self(self, i + 1)) return true;
      xor_into(up, pm[i]);
      xor_into(uq, qm[i]);
      family.pop_back();
    }
    return false;
  };
  if (dfs(dfs, 0)) return family;
  return std::nullopt;
}

std::vector<std::size_t> cyclic_from_blocks(const BlockBijection& b) {
  if (auto f = block_condition_violation(b)) throw BlockConditionError("a proper union of blocks is invariant", *f);
  std::vector<std::size_t> sigma(b.n, 0);
  for (std::size_t i = 0; i < b.p.size(); ++i) {
    auto from = b.p[i], to = b.q[b.pi[i]];
    std::sort(from.begin(), from.end());
    std::sort(to.begin(), to.end());
    for (std::size_t k = 0; k < from.size(); ++k) sigma[from[k] - 1] = to[k];
  }
  std::size_t count = cycle_count(sigma);
  while (count > 1) {
    std::vector<bool> in_c(b.n + 1, false);
    for (std::size_t x = 1;;) {
      in_c[x] = true;
      x = sigma[x - 1];
      if (x == 1) break;
    }
    bool merged = false;
    for (const auto& block : b.p) {
      std::size_t i = 0, j = 0;
      for (std::size_t x : block) {
        if (in_c[x] && (i == 0 || x < i)) i = x;
        if (!in_c[x] && (j == 0 || x < j)) j = x;
      }
      if (i == 0 || j == 0) continue;
      std::swap(sigma[i - 1], sigma[j - 1]);
      merged = true;
      break;
    }
    std::size_t next = cycle_count(sigma);
    if (!merged || next >= count) throw std::logic_error("cycle merging made no progress");
    count = next;
  }
  return sigma;
}

std::size_t cycle_count(const std::vector<std::size_t>& sigma) { return cycles_of(sigma).size(); }

std::string cycle_notation(const std::vector<std::size_t>& sigma) {
  std::string out;
  for (const auto& c : cycles_of(sigma)) {
    out += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(c[i]);
    }
    out += ')';
  }
  return out;
}

json to_json(const FullGroupElement& s) {
  json towers = json::array();
  for (std::size_t w = 0; w < s.r.size(); ++w) towers.push_back({{"w", w}, {"r", s.r[w]}});
  return {{"level", s.level}, {"towers", towers}};
}

FullGroupElement full_group_element_from_json(const json& j) {
  FullGroupElement s;
  s.level = j.at("level").get<std::size_t>();
  const auto& towers = j.at("towers");
  s.r.resize(towers.size());
  for (const auto& t : towers) {
    std::size_t w = t.at("w").get<std::size_t>();
    if (w >= s.r.size()) throw StructuralError("tower index out of range");
    s.r[w] = t.at("r").get<std::vector<std::int64_t>>();
  }
  return s;
}

json to_json(const ClopenSet& u) {
  json cells = json::array();
  for (const Cell& c : u.cells) cells.push_back({c.tower, c.floor});
  return {{"level", u.level}, {"cells", cells}};
}

ClopenSet clopen_from_json(const json& j) {
  ClopenSet u;
  u.level = j.at("level").get<std::size_t>();
  for (const auto& c : j.at("cells")) u.cells.insert(Cell{c.at(0).get<std::size_t>(), c.at(1).get<std::uint64_t>()});
  return u;
}

ClopenSet alpha_image(const OrderedBratteliDiagram& d, const ClopenSet& u, std::size_t max_extra) {
  for (std::size_t k = 1; k <= max_extra; ++k) {
    const std::size_t level = u.level + k;
    ClopenSet fine = refine(d, u, level);
    auto h = heights_u64(d, level);
    std::size_t roofs = 0;
    for (std::size_t w = 0; w < h.size(); ++w) roofs += fine.cells.count(Cell{w, h[w]});
    if (roofs != 0 && roofs != h.size()) continue;
    ClopenSet out{level, {}};
    for (const Cell& c : fine.cells)
      if (c.floor < h[c.tower]) out.cells.insert(Cell{c.tower, c.floor + 1});
    if (roofs != 0)
      for (std::size_t w = 0; w < h.size(); ++w) out.cells.insert(Cell{w, 1});
    return out;
  }
  throw CapabilityError("image of the roof cells is not resolved within the level bound");
}

ConjugatorConstruction conjugator_from_partition(const OrderedBratteliDiagram& d, const std::vector<ClopenSet>& blocks,
                                                 const std::vector<ClopenSet>& images, std::size_t lookahead_bound) {
  if (blocks.empty() || blocks.size() != images.size()) throw PreconditionError("need one image per block");
  const std::size_t m = max_level(blocks, images);
  const std::size_t k = blocks.size();
  label_cells(d, blocks, m, "blocks");
  label_cells(d, images, m, "images");
  DimGroup g(d);
  std::vector<IntVector> delta;
  for (std::size_t i = 0; i < k; ++i) {
    DgElement a = class_of_clopen(d, refine(d, blocks[i], m)), b = class_of_clopen(d, refine(d, images[i], m));
    if (g.equal(a, b, 40).verdict != Ternary::Yes) {
      throw ConjugatorError("block " + std::to_string(i) + " and its image have different classes",
                            {ConjugatorFailure::Stage::ClassMismatch, i, 0, {}});
    }
    delta.push_back(a.vector - b.vector);
  }
  for (std::size_t n = m + 1; n <= lookahead_bound; ++n) {
    if (d.last_level() && n > *d.last_level()) break;
    IntMatrix c = d.connecting(m, n);
    // Every tower must pass through every level-m cell, and each block must
    // have as many floors as its image in every tower.
    if (!c.is_strictly_positive()) continue;
    bool counts_match = std::all_of(delta.begin(), delta.end(), [&](const IntVector& x) { return all_zero(c * x); });
    if (!counts_match) continue;

    auto h = heights_u64(d, n);
    std::vector<std::vector<std::size_t>> plab(h.size()), qlab(h.size());
    for (std::size_t w = 0; w < h.size(); ++w) {
      plab[w].assign(h[w], 0);
      qlab[w].assign(h[w], 0);
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (const Cell& x : refine(d, blocks[i], n).cells) plab[x.tower][x.floor - 1] = i;
      for (const Cell& x : refine(d, images[i], n).cells) qlab[x.tower][x.floor - 1] = i;
    }
    ConjugatorConstruction out;
    out.block_level = m;
    out.base_block = 0;
    out.sigma.level = n;
    out.sigma.r.resize(h.size());
    for (std::size_t w = 0; w < h.size(); ++w) {
      BlockBijection bb;
      bb.n = h[w];
      bb.p.resize(k);
      bb.q.resize(k);
      for (std::size_t j = 1; j <= h[w]; ++j) {
        bb.p[plab[w][j - 1]].push_back(j);
        bb.q[qlab[w][j - 1]].push_back(j);
      }
      bb.pi.resize(k);
      std::iota(bb.pi.begin(), bb.pi.end(), 0);
      std::vector<std::size_t> sigma;
      try {
        sigma = cyclic_from_blocks(bb);
      } catch (const BlockConditionError& e) {
        throw ConjugatorError("block condition fails in tower " + std::to_string(w) + " at level " + std::to_string(n),
                              {ConjugatorFailure::Stage::BlockCondition, 0, w, e.family()});
      }
      const std::uint64_t jw = bb.p[0].front();
      out.base_floor.push_back(jw);
      // r(w,j) = σ_w^j(j_w) - j.
      std::uint64_t x = jw;
      for (std::uint64_t j = 1; j <= h[w]; ++j) {
        x = sigma[x - 1];
        out.sigma.r[w].push_back(static_cast<std::int64_t>(x) - static_cast<std::int64_t>(j));
      }
    }
    return out;
  }
  throw ConjugatorError("no admissible level up to " + std::to_string(lookahead_bound),
                        {ConjugatorFailure::Stage::NoAdmissibleLevel, 0, 0, {}});
}

std::string to_string(ConjugatorCheck::Outcome o) {
  switch (o) {
    case ConjugatorCheck::Outcome::Ok: return "ok";
    case ConjugatorCheck::Outcome::NotBijective: return "not-bijective";
    case ConjugatorCheck::Outcome::BlockMismatch: return "block-mismatch";
    default: return "inconclusive";
  }
}

ConjugatorCheck verify_conjugator(const OrderedBratteliDiagram& d, const FullGroupElement& s,
                                  const std::vector<ClopenSet>& blocks, const std::vector<ClopenSet>& images,
                                  std::size_t lookahead) {
  if (lookahead < 1) throw PreconditionError("lookahead must be at least 1");
  if (blocks.size() != images.size()) throw PreconditionError("need one image per block");
  auto hs = heights_u64(d, s.level);
  if (s.r.size() != hs.size()) throw PreconditionError("conjugator table has the wrong number of towers");
  for (std::size_t w = 0; w < hs.size(); ++w)
    if (s.r[w].size() != hs[w]) throw PreconditionError("conjugator table has the wrong tower height");

  ConjugatorCheck out;
  out.level = s.level + lookahead;
  const std::size_t level = out.level;
  if (max_level(blocks, images) > level) throw PreconditionError("blocks are finer than the verification level");
  auto h = heights_u64(d, level);
  std::vector<std::uint64_t> offset(h.size() + 1, 0);
  for (std::size_t w = 0; w < h.size(); ++w) offset[w + 1] = offset[w] + h[w];
  const std::uint64_t total = offset.back();
  auto index = [&](const Cell& c) { return offset[c.tower] + c.floor - 1; };
  auto cell_at = [&](std::uint64_t i) {
    std::size_t w = static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), i) - offset.begin()) - 1;
    return Cell{w, i - offset[w] + 1};
  };

  std::vector<std::size_t> plab(total), qlab(total);
  for (const auto& [c, i] : label_cells(d, blocks, level, "blocks")) plab[index(c)] = i;
  for (const auto& [c, i] : label_cells(d, images, level, "images")) qlab[index(c)] = i;

  // σ on fine cells: α^r moves along the fine tower.
  constexpr std::uint64_t kNone = ~std::uint64_t{0};
  std::vector<std::uint64_t> img(total, kNone), inv(total, kNone);
  TowerSegments seg = tower_segments(d, s.level, level);
  for (std::size_t w = 0; w < h.size(); ++w) {
    for (const auto& [tw, off] : seg[w]) {
      for (std::uint64_t f = 1; f <= hs[tw]; ++f) {
        const std::int64_t target = static_cast<std::int64_t>(off + f) + s.r[tw][f - 1];
        if (target < 1 || target > static_cast<std::int64_t>(h[w])) {
          ++out.unresolved;
          continue;
        }
        const std::uint64_t src = offset[w] + off + f - 1, dst = offset[w] + static_cast<std::uint64_t>(target) - 1;
        if (inv[dst] != kNone) {
          out.outcome = ConjugatorCheck::Outcome::NotBijective;
          out.block = plab[dst];
          out.cell = cell_at(dst);
          return out;
        }
        img[src] = dst;
        inv[dst] = src;
      }
    }
  }
  if (out.unresolved > 0) return out;

  // Off the roofs, σασ⁻¹ is computed cell by cell.
  for (std::uint64_t x = 0; x < total; ++x) {
    Cell c = cell_at(inv[x]);
    if (c.floor == h[c.tower]) continue;
    std::uint64_t y = img[inv[x] + 1];
    if (qlab[y] != plab[x]) {
      out.outcome = ConjugatorCheck::Outcome::BlockMismatch;
      out.block = plab[x];
      out.cell = cell_at(x);
      return out;
    }
  }
  // The roofs jointly map onto the bases, so their σ-images must lie in a
  // single block whose image receives σ of every base.
  std::optional<std::size_t> roof_block;
  for (std::size_t w = 0; w < h.size(); ++w) {
    std::size_t b = plab[img[index(Cell{w, h[w]})]];
    if (roof_block && *roof_block != b) {
      out.unresolved = h.size();
      return out;
    }
    roof_block = b;
  }
  for (std::size_t w = 0; w < h.size(); ++w) {
    std::uint64_t y = img[index(Cell{w, 1})];
    if (qlab[y] != *roof_block) {
      out.outcome = ConjugatorCheck::Outcome::BlockMismatch;
      out.block = *roof_block;
      out.cell = cell_at(y);
      return out;
    }
  }
  out.outcome = ConjugatorCheck::Outcome::Ok;
  return out;
}

}  // namespace bvk

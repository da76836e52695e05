#include "bvk/bratteli.hpp"

#include "bvk/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bvk {

using nlohmann::json;

namespace {

constexpr std::uint64_t kMaxEnumeratedCells = std::uint64_t{1} << 24;

EdgeTable read_table(const json& j, const char* name) {
  if (!j.is_array()) throw StructuralError(std::string("\"") + name + "\" must be an array of arrays");
  EdgeTable t;
  for (const auto& row : j) {
    if (!row.is_array()) throw StructuralError(std::string("\"") + name + "\" must be an array of arrays");
    std::vector<std::size_t> list;
    for (const auto& x : row) {
      if (!x.is_number_integer() || x.get<long long>() < 0) {
        throw StructuralError(std::string("\"") + name + "\" entries must be nonnegative integers");
      }
      list.push_back(x.get<std::size_t>());
    }
    t.push_back(std::move(list));
  }
  return t;
}

void check_table(const EdgeTable& t, std::size_t sources, std::size_t level, bool require_outgoing) {
  std::vector<bool> used(sources, false);
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t[v].empty()) {
      throw StructuralError("vertex " + std::to_string(v) + " at level " + std::to_string(level + 1) +
                            " has an empty edge list");
    }
    for (std::size_t s : t[v]) {
      if (s >= sources) {
        throw StructuralError("vertex " + std::to_string(v) + " at level " + std::to_string(level + 1) +
                              " references source " + std::to_string(s) + " but level " +
                              std::to_string(level) + " has " + std::to_string(sources) + " vertices");
      }
      used[s] = true;
    }
  }
  if (require_outgoing) {
    for (std::size_t s = 0; s < sources; ++s) {
      if (!used[s]) {
        throw StructuralError("vertex " + std::to_string(s) + " at level " + std::to_string(level) +
                              " has no outgoing edge");
      }
    }
  }
}

json table_json(const EdgeTable& t) {
  json out = json::array();
  for (const auto& list : t) out.push_back(list);
  return out;
}

}  // namespace

std::string to_string(ValidationReport::Verdict v) {
  switch (v) {
    case ValidationReport::Verdict::Yes: return "yes";
    case ValidationReport::Verdict::No: return "no";
    default: return "unknown";
  }
}

OrderedBratteliDiagram OrderedBratteliDiagram::stationary(std::size_t vertices, EdgeTable root, EdgeTable table) {
  OrderedBratteliDiagram d;
  d.kind_ = DiagramKind::Stationary;
  d.stationary_vertices_ = vertices;
  d.tables_ = {std::move(root), std::move(table)};
  d.check_structure();
  d.stationary_matrix_ = d.incidence(1);
  return d;
}

OrderedBratteliDiagram OrderedBratteliDiagram::explicit_levels(std::vector<EdgeTable> tables) {
  OrderedBratteliDiagram d;
  d.kind_ = DiagramKind::Explicit;
  d.tables_ = std::move(tables);
  d.check_structure();
  return d;
}

void OrderedBratteliDiagram::check_structure() const {
  if (kind_ == DiagramKind::Stationary) {
    if (stationary_vertices_ == 0) throw StructuralError("stationary diagram needs at least one vertex");
    if (tables_[0].size() != stationary_vertices_) {
      throw StructuralError("root table has " + std::to_string(tables_[0].size()) + " lists, expected " +
                            std::to_string(stationary_vertices_));
    }
    if (tables_[1].size() != stationary_vertices_) {
      throw StructuralError("table has " + std::to_string(tables_[1].size()) + " lists, expected " +
                            std::to_string(stationary_vertices_));
    }
    check_table(tables_[0], 1, 0, true);
    check_table(tables_[1], stationary_vertices_, 1, true);
    return;
  }
  if (tables_.empty()) throw StructuralError("explicit diagram needs at least one table");
  std::size_t sources = 1;
  for (std::size_t n = 0; n < tables_.size(); ++n) {
    if (tables_[n].empty()) throw StructuralError("level " + std::to_string(n + 1) + " has no vertices");
    check_table(tables_[n], sources, n, true);
    sources = tables_[n].size();
  }
}

std::optional<std::size_t> OrderedBratteliDiagram::last_level() const {
  if (kind_ == DiagramKind::Stationary) return std::nullopt;
  return tables_.size();
}

void OrderedBratteliDiagram::require_level(std::size_t m) const {
  if (kind_ == DiagramKind::Explicit && m > tables_.size()) {
    throw LevelOutOfRange("level " + std::to_string(m) + " is past the last level " +
                          std::to_string(tables_.size()) + " of the explicit diagram");
  }
}

std::size_t OrderedBratteliDiagram::vertex_count(std::size_t level) const {
  if (level == 0) return 1;
  require_level(level);
  if (kind_ == DiagramKind::Stationary) return stationary_vertices_;
  return tables_[level - 1].size();
}

const EdgeTable& OrderedBratteliDiagram::table(std::size_t n) const {
  require_level(n + 1);
  if (kind_ == DiagramKind::Stationary) return n == 0 ? tables_[0] : tables_[1];
  return tables_[n];
}

IntMatrix OrderedBratteliDiagram::incidence(std::size_t n) const {
  const EdgeTable& t = table(n);
  IntMatrix m(t.size(), vertex_count(n));
  for (std::size_t v = 0; v < t.size(); ++v)
    for (std::size_t s : t[v]) m(v, s) += 1;
  return m;
}

IntMatrix OrderedBratteliDiagram::connecting(std::size_t from, std::size_t to) const {
  if (to < from) throw PreconditionError("connecting map needs from <= to");
  require_level(to);
  if (kind_ == DiagramKind::Stationary && from >= 1) return stationary_matrix_.power(to - from);
  IntMatrix out = IntMatrix::identity(vertex_count(from));
  for (std::size_t n = from; n < to; ++n) out = incidence(n) * out;
  return out;
}

const IntMatrix& OrderedBratteliDiagram::stationary_matrix() const {
  if (kind_ != DiagramKind::Stationary) throw PreconditionError("diagram is not stationary");
  return stationary_matrix_;
}

IntVector OrderedBratteliDiagram::heights(std::size_t m) const {
  require_level(m);
  IntVector h{1};
  for (std::size_t n = 0; n < m; ++n) {
    const EdgeTable& t = table(n);
    IntVector next(t.size());
    for (std::size_t v = 0; v < t.size(); ++v)
      for (std::size_t s : t[v]) next[v] += h[s];
    h = std::move(next);
  }
  return h;
}

std::string OrderedBratteliDiagram::serialize() const {
  json j;
  j["format"] = "obd-v1";
  if (kind_ == DiagramKind::Stationary) {
    j["kind"] = "stationary";
    j["vertices"] = stationary_vertices_;
    j["root"] = table_json(tables_[0]);
    j["table"] = table_json(tables_[1]);
  } else {
    j["kind"] = "explicit";
    json counts = json::array({1});
    json tables = json::array();
    for (const auto& t : tables_) {
      counts.push_back(t.size());
      tables.push_back(table_json(t));
    }
    j["vertices"] = counts;
    j["tables"] = tables;
  }
  return j.dump() + "\n";
}

bool OrderedBratteliDiagram::operator==(const OrderedBratteliDiagram& rhs) const {
  return kind_ == rhs.kind_ && stationary_vertices_ == rhs.stationary_vertices_ && tables_ == rhs.tables_;
}

OrderedBratteliDiagram parse_diagram(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("obd-v1 syntax error: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw StructuralError("obd-v1 document must be a JSON object");
  auto field = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end()) throw StructuralError(std::string("missing field \"") + name + "\"");
    return *it;
  };
  if (field("format") != "obd-v1") throw StructuralError("unsupported format, expected \"obd-v1\"");
  const json& kind = field("kind");
  if (kind == "stationary") {
    for (const auto& [key, _] : j.items()) {
      if (key != "format" && key != "kind" && key != "vertices" && key != "root" && key != "table") {
        throw StructuralError("unexpected field \"" + key + "\"");
      }
    }
    const json& n = field("vertices");
    if (!n.is_number_integer() || n.get<long long>() < 1) {
      throw StructuralError("\"vertices\" must be a positive integer for a stationary diagram");
    }
    return OrderedBratteliDiagram::stationary(n.get<std::size_t>(), read_table(field("root"), "root"),
                                              read_table(field("table"), "table"));
  }
  if (kind == "explicit") {
    for (const auto& [key, _] : j.items()) {
      if (key != "format" && key != "kind" && key != "vertices" && key != "tables") {
        throw StructuralError("unexpected field \"" + key + "\"");
      }
    }
    const json& counts = field("vertices");
    const json& tables = field("tables");
    if (!counts.is_array() || !tables.is_array()) {
      throw StructuralError("\"vertices\" and \"tables\" must be arrays");
    }
    if (counts.size() != tables.size() + 1) {
      throw StructuralError("\"vertices\" must have one more entry than \"tables\"");
    }
    if (counts[0] != 1) throw StructuralError("level 0 must have exactly one (root) vertex");
    std::vector<EdgeTable> ts;
    for (std::size_t n = 0; n < tables.size(); ++n) {
      ts.push_back(read_table(tables[n], "tables"));
      if (!counts[n + 1].is_number_integer() || counts[n + 1].get<long long>() < 0 ||
          counts[n + 1].get<std::size_t>() != ts.back().size()) {
        throw StructuralError("vertex count of level " + std::to_string(n + 1) +
                              " does not match its table");
      }
    }
    return OrderedBratteliDiagram::explicit_levels(std::move(ts));
  }
  throw StructuralError("\"kind\" must be \"stationary\" or \"explicit\"");
}

OrderedBratteliDiagram load_diagram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_diagram(ss.str());
}

std::string serialize_diagram(const OrderedBratteliDiagram& d) { return d.serialize(); }

IntVector heights(const OrderedBratteliDiagram& d, std::size_t m) { return d.heights(m); }

namespace {

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix support(const IntMatrix& a) {
  BoolMatrix b(a.rows(), std::vector<bool>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) b[i][j] = a(i, j) != 0;
  return b;
}

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  BoolMatrix out(a.size(), std::vector<bool>(b.empty() ? 0 : b[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < b[k].size(); ++j)
          if (b[k][j]) out[i][j] = true;
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> zero_entry(const BoolMatrix& b) {
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b[i].size(); ++j)
      if (!b[i][j]) return std::make_pair(i, j);
  return std::nullopt;
}

// Points lying on cycles of a self-map of {0..n-1}.
std::vector<std::vector<std::size_t>> cycles_of(const std::vector<std::size_t>& f) {
  const std::size_t n = f.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::vector<std::size_t>> cycles;
  for (std::size_t start = 0; start < n; ++start) {
    if (state[start]) continue;
    std::vector<std::size_t> trail;
    std::size_t x = start;
    while (state[x] == 0) {
      state[x] = 1;
      trail.push_back(x);
      x = f[x];
    }
    if (state[x] == 1) {
      auto it = std::find(trail.begin(), trail.end(), x);
      cycles.emplace_back(it, trail.end());
    }
    for (std::size_t y : trail) state[y] = 2;
  }
  return cycles;
}

std::string describe_cycles(const std::vector<std::vector<std::size_t>>& cycles) {
  std::string s;
  for (const auto& c : cycles) {
    if (!s.empty()) s += " ";
    s += "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
    s += ")";
  }
  return s;
}

}  // namespace

ValidationReport validate(const OrderedBratteliDiagram& d, std::size_t depth) {
  if (depth < 1) throw PreconditionError("validation depth must be at least 1");
  ValidationReport r;
  r.depth = depth;
  using V = ValidationReport::Verdict;
  if (d.is_stationary()) {
    const IntMatrix& a = d.stationary_matrix();
    const std::size_t n = a.rows();
    // Wielandt: a primitive n x n matrix has A^k > 0 for k = (n-1)^2 + 1.
    const std::size_t bound = std::max(depth, (n - 1) * (n - 1) + 1);
    BoolMatrix base = support(a);
    BoolMatrix p = base;
    for (std::size_t k = 1; k <= bound; ++k) {
      if (!zero_entry(p)) {
        r.primitive = V::Yes;
        r.primitive_power = k;
        break;
      }
      if (k < bound) p = bool_product(p, base);
    }
    if (r.primitive != V::Yes) {
      auto z = zero_entry(p);
      r.primitive = V::No;
      r.primitive_power = bound;
      r.primitive_witness = "entry (" + std::to_string(z->first) + "," + std::to_string(z->second) +
                            ") of A^" + std::to_string(bound) + " is zero, and stays zero in every power";
    }
    std::vector<std::size_t> smax(n), smin(n);
    for (std::size_t v = 0; v < n; ++v) {
      smax[v] = d.table(1)[v].back();
      smin[v] = d.table(1)[v].front();
    }
    auto cmax = cycles_of(smax);
    auto cmin = cycles_of(smin);
    bool max_ok = cmax.size() == 1 && cmax[0].size() == 1;
    bool min_ok = cmin.size() == 1 && cmin[0].size() == 1;
    r.properly_ordered = (max_ok && min_ok) ? V::Yes : V::No;
    if (!max_ok) {
      r.ordering_witness = "max-edge source map has periodic cycles " + describe_cycles(cmax) +
                           ", so there is more than one maximal path";
    }
    if (!min_ok) {
      if (!r.ordering_witness.empty()) r.ordering_witness += "; ";
      r.ordering_witness += "min-edge source map has periodic cycles " + describe_cycles(cmin) +
                            ", so there is more than one minimal path";
    }
    return r;
  }

  const std::size_t last = *d.last_level();
  r.primitive = V::Yes;
  for (std::size_t n = 1; n < last && r.primitive == V::Yes; ++n) {
    BoolMatrix p = support(d.incidence(n));
    std::size_t m = n + 1;
    while (zero_entry(p) && m < last && m - n < depth) {
      p = bool_product(support(d.incidence(m)), p);
      ++m;
    }
    if (zero_entry(p)) {
      r.primitive = V::Unknown;
      r.primitive_witness = "no strictly positive connecting matrix from level " + std::to_string(n) +
                            " within the available levels";
    } else {
      r.primitive_power = std::max(r.primitive_power, m - n);
    }
  }
  // Backward walks along max (resp. min) edges from every top vertex.
  auto walk = [&](bool use_max) {
    std::vector<std::size_t> current(d.vertex_count(last));
    for (std::size_t v = 0; v < current.size(); ++v) current[v] = v;
    std::size_t level = last;
    const std::size_t stop = last > depth ? last - depth : 1;
    while (level > stop) {
      std::set<std::size_t> next;
      for (std::size_t v : current) {
        const auto& list = d.table(level - 1)[v];
        next.insert(use_max ? list.back() : list.front());
      }
      current.assign(next.begin(), next.end());
      --level;
    }
    return current.size();
  };
  std::size_t nmax = walk(true), nmin = walk(false);
  if (nmax == 1 && nmin == 1) {
    r.properly_ordered = V::Yes;
  } else {
    r.properly_ordered = V::Unknown;
    r.ordering_witness = "backward max walk ends on " + std::to_string(nmax) + " vertices, min walk on " +
                         std::to_string(nmin);
  }
  return r;
}

void check_path(const OrderedBratteliDiagram& d, const Path& path) {
  d.require_level(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    const EdgeTable& t = d.table(i);
    if (path[i].target >= t.size() || path[i].position >= t[path[i].target].size()) {
      throw PreconditionError("path edge " + std::to_string(i) + " does not exist");
    }
    if (i > 0 && t[path[i].target][path[i].position] != path[i - 1].target) {
      throw PreconditionError("path edges " + std::to_string(i - 1) + " and " + std::to_string(i) +
                              " are not adjacent");
    }
  }
}

std::size_t path_end(const Path& path) { return path.empty() ? 0 : path.back().target; }

std::variant<Path, MaxPath> vershik_successor(const OrderedBratteliDiagram& d, const Path& path) {
  check_path(d, path);
  std::size_t i = 0;
  while (i < path.size() && path[i].position + 1 == d.table(i)[path[i].target].size()) ++i;
  if (i == path.size()) return MaxPath{};
  Path next = path;
  next[i].position += 1;
  for (std::size_t j = i; j-- > 0;) {
    next[j].target = d.table(j + 1)[next[j + 1].target][next[j + 1].position];
    next[j].position = 0;
  }
  return next;
}

namespace {

Path extreme_path(const OrderedBratteliDiagram& d, std::size_t m, std::size_t vertex, bool use_max) {
  if (vertex >= d.vertex_count(m)) throw PreconditionError("vertex out of range");
  Path p(m);
  std::size_t v = vertex;
  for (std::size_t j = m; j-- > 0;) {
    const auto& list = d.table(j)[v];
    p[j] = Edge{v, use_max ? list.size() - 1 : 0};
    v = list[p[j].position];
  }
  return p;
}

}  // namespace

Path min_path(const OrderedBratteliDiagram& d, std::size_t m, std::size_t vertex) {
  return extreme_path(d, m, vertex, false);
}

Path max_path(const OrderedBratteliDiagram& d, std::size_t m, std::size_t vertex) {
  return extreme_path(d, m, vertex, true);
}

BigInt floor_of(const OrderedBratteliDiagram& d, const Path& path) {
  check_path(d, path);
  BigInt floor = 1;
  IntVector h{1};
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& list = d.table(i)[path[i].target];
    for (std::size_t p = 0; p < path[i].position; ++p) floor += h[list[p]];
    h = d.heights(i + 1);
  }
  return floor;
}

Path path_of_cell(const OrderedBratteliDiagram& d, std::size_t m, std::size_t tower, const BigInt& floor) {
  IntVector hm = d.heights(m);
  if (tower >= hm.size()) throw PreconditionError("tower index out of range");
  if (floor < 1 || floor > hm[tower]) throw PreconditionError("floor out of range");
  std::vector<IntVector> hs;
  for (std::size_t i = 0; i <= m; ++i) hs.push_back(d.heights(i));
  Path p(m);
  BigInt remaining = floor - 1;
  std::size_t v = tower;
  for (std::size_t j = m; j-- > 0;) {
    const auto& list = d.table(j)[v];
    std::size_t pos = 0;
    while (remaining >= hs[j][list[pos]]) {
      remaining -= hs[j][list[pos]];
      ++pos;
    }
    p[j] = Edge{v, pos};
    v = list[pos];
  }
  return p;
}

Cell project_cell(const OrderedBratteliDiagram& d, std::size_t to, const Cell& c, std::size_t from) {
  if (from > to) throw PreconditionError("projection goes to a coarser level");
  Path p = path_of_cell(d, to, c.tower, BigInt(c.floor));
  p.resize(from);
  return Cell{path_end(p), static_cast<std::uint64_t>(floor_of(d, p))};
}

namespace {

// For every tower at level `to`: its decomposition into level-`from` towers
// as (tower, zero-based offset) segments, bottom to top.
TowerSegments segments(const OrderedBratteliDiagram& d, std::size_t from, std::size_t to) {
  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> seg(d.vertex_count(from));
  for (std::size_t v = 0; v < seg.size(); ++v) seg[v] = {{v, 0}};
  IntVector h = d.heights(from);
  std::vector<std::uint64_t> hs;
  for (const auto& x : h) hs.push_back(to_u64(x, "tower height"));
  for (std::size_t n = from; n < to; ++n) {
    const EdgeTable& t = d.table(n);
    std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> next(t.size());
    std::vector<std::uint64_t> nh(t.size(), 0);
    for (std::size_t w = 0; w < t.size(); ++w) {
      std::uint64_t offset = 0;
      for (std::size_t s : t[w]) {
        for (const auto& [tw, off] : seg[s]) next[w].emplace_back(tw, off + offset);
        offset += hs[s];
      }
      nh[w] = offset;
      if (offset > kMaxEnumeratedCells) throw CapabilityError("tower too tall to enumerate");
    }
    seg = std::move(next);
    hs = std::move(nh);
  }
  return seg;
}

}  // namespace

TowerSegments tower_segments(const OrderedBratteliDiagram& d, std::size_t from, std::size_t to) {
  if (from > to) throw PreconditionError("segments go to a coarser level");
  return segments(d, from, to);
}

std::vector<Cell> refine_cell(const OrderedBratteliDiagram& d, std::size_t from, const Cell& c, std::size_t to) {
  if (from > to) throw PreconditionError("refinement goes to a coarser level");
  auto seg = segments(d, from, to);
  std::vector<Cell> out;
  for (std::size_t w = 0; w < seg.size(); ++w)
    for (const auto& [tw, off] : seg[w])
      if (tw == c.tower) out.push_back(Cell{w, off + c.floor});
  std::sort(out.begin(), out.end());
  return out;
}

ClopenSet refine(const OrderedBratteliDiagram& d, const ClopenSet& u, std::size_t to) {
  if (u.level > to) throw PreconditionError("refinement goes to a coarser level");
  auto seg = segments(d, u.level, to);
  std::vector<std::vector<std::uint64_t>> by_tower(d.vertex_count(u.level));
  for (const Cell& c : u.cells) by_tower.at(c.tower).push_back(c.floor);
  ClopenSet out{to, {}};
  for (std::size_t w = 0; w < seg.size(); ++w)
    for (const auto& [tw, off] : seg[w])
      for (std::uint64_t f : by_tower[tw]) out.cells.insert(Cell{w, off + f});
  return out;
}

std::uint64_t cell_count(const OrderedBratteliDiagram& d, std::size_t m) {
  BigInt total = 0;
  for (const auto& h : d.heights(m)) total += h;
  return to_u64(total, "cell count");
}

ClopenSet whole_space(const OrderedBratteliDiagram& d, std::size_t m) {
  if (cell_count(d, m) > kMaxEnumeratedCells) throw CapabilityError("too many cells to enumerate");
  IntVector h = d.heights(m);
  ClopenSet u{m, {}};
  for (std::size_t v = 0; v < h.size(); ++v)
    for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(h[v]); ++k) u.cells.insert(Cell{v, k});
  return u;
}

std::optional<Cell> cell_successor(const OrderedBratteliDiagram& d, std::size_t m, const Cell& c) {
  IntVector h = d.heights(m);
  if (c.tower >= h.size() || c.floor < 1 || BigInt(c.floor) > h[c.tower]) {
    throw PreconditionError("cell out of range");
  }
  if (BigInt(c.floor) == h[c.tower]) return std::nullopt;
  return Cell{c.tower, c.floor + 1};
}

TowerMap tower_map(const OrderedBratteliDiagram& d, std::size_t m, std::size_t lookahead) {
  if (lookahead <= m) throw PreconditionError("lookahead level must exceed the base level");
  d.require_level(lookahead);
  if (cell_count(d, lookahead) > kMaxEnumeratedCells) throw CapabilityError("too many cells to enumerate");
  TowerMap tm;
  tm.level = m;
  tm.lookahead = lookahead;
  IntVector hf = d.heights(lookahead);
  tm.fine.resize(hf.size());
  for (std::size_t w = 0; w < hf.size(); ++w) {
    auto hw = static_cast<std::uint64_t>(hf[w]);
    for (std::uint64_t k = 1; k <= hw; ++k) {
      if (k < hw) {
        tm.fine[w].push_back(Cell{w, k + 1});
      } else {
        tm.fine[w].push_back(std::nullopt);
        ++tm.unresolved;
      }
    }
  }
  // Level-m image of each fine cell via the segment layout.
  auto seg = segments(d, m, lookahead);
  IntVector hm = d.heights(m);
  auto coarse_of = [&](const Cell& f) {
    const auto& s = seg[f.tower];
    auto it = std::upper_bound(s.begin(), s.end(), f.floor - 1,
                               [](std::uint64_t x, const auto& e) { return x < e.second; });
    --it;
    return Cell{it->first, f.floor - it->second};
  };
  for (std::size_t v = 0; v < hm.size(); ++v) {
    TowerMap::CoarseEntry e;
    e.cell = Cell{v, static_cast<std::uint64_t>(hm[v])};
    for (std::size_t w = 0; w < seg.size(); ++w) {
      for (const auto& [tw, off] : seg[w]) {
        if (tw != v) continue;
        Cell f{w, off + e.cell.floor};
        const auto& img = tm.fine[w][f.floor - 1];
        e.refinements.emplace_back(f, img ? std::optional<Cell>(coarse_of(*img)) : std::nullopt);
      }
    }
    std::sort(e.refinements.begin(), e.refinements.end());
    tm.roofs.push_back(std::move(e));
  }
  return tm;
}

DgElement class_of_clopen(const OrderedBratteliDiagram& d, const ClopenSet& u) {
  IntVector h = d.heights(u.level);
  IntVector counts(h.size());
  for (const Cell& c : u.cells) {
    if (c.tower >= h.size() || c.floor < 1 || BigInt(c.floor) > h[c.tower]) {
      throw PreconditionError("clopen set contains a cell outside level " + std::to_string(u.level));
    }
    counts[c.tower] += 1;
  }
  return DgElement{u.level, counts};
}

}  // namespace bvk

#pragma once

#include "bvk/arith.hpp"
#include "bvk/dg_element.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bvk {

// One ordered list of sources per target vertex. Position in the list is the
// edge order; repetition is multiplicity.
using EdgeTable = std::vector<std::vector<std::size_t>>;

enum class DiagramKind { Stationary, Explicit };

// An edge into `target` at level n+1, the `position`-th entry of its list.
struct Edge {
  std::size_t target = 0;
  std::size_t position = 0;
  auto operator<=>(const Edge&) const = default;
};

// Root-to-level-m path; element i is the edge from level i to level i+1, so
// element 0 is the least significant digit.
using Path = std::vector<Edge>;

struct MaxPath {
  bool operator==(const MaxPath&) const = default;
};

struct Cell {
  std::size_t tower = 0;
  std::uint64_t floor = 1;  // 1-based
  auto operator<=>(const Cell&) const = default;
};

struct ClopenSet {
  std::size_t level = 0;
  std::set<Cell> cells;
  bool operator==(const ClopenSet&) const = default;
};

struct ValidationReport {
  enum class Verdict { Yes, No, Unknown };
  Verdict primitive = Verdict::Unknown;
  std::size_t primitive_power = 0;  // exponent k with A^k > 0 (stationary) or telescope span
  std::string primitive_witness;
  Verdict properly_ordered = Verdict::Unknown;
  std::string ordering_witness;
  std::size_t depth = 0;
};

std::string to_string(ValidationReport::Verdict v);

class OrderedBratteliDiagram {
 public:
  static OrderedBratteliDiagram stationary(std::size_t vertices, EdgeTable root, EdgeTable table);
  static OrderedBratteliDiagram explicit_levels(std::vector<EdgeTable> tables);

  DiagramKind kind() const { return kind_; }
  bool is_stationary() const { return kind_ == DiagramKind::Stationary; }
  // Deepest available level; nullopt for stationary diagrams.
  std::optional<std::size_t> last_level() const;
  void require_level(std::size_t m) const;

  std::size_t vertex_count(std::size_t level) const;
  // Table for the transition level n -> n+1.
  const EdgeTable& table(std::size_t n) const;
  // Rows indexed by V_{n+1}, columns by V_n.
  IntMatrix incidence(std::size_t n) const;
  // M_{to-1} ... M_from; identity when to == from.
  IntMatrix connecting(std::size_t from, std::size_t to) const;
  // The stationary matrix A (rows targets, columns sources).
  const IntMatrix& stationary_matrix() const;

  IntVector heights(std::size_t m) const;

  std::string serialize() const;
  bool operator==(const OrderedBratteliDiagram& rhs) const;

  // Access to the stored tables, for serialization.
  const std::vector<EdgeTable>& stored_tables() const { return tables_; }

 private:
  OrderedBratteliDiagram() = default;
  void check_structure() const;

  DiagramKind kind_ = DiagramKind::Stationary;
  std::size_t stationary_vertices_ = 0;
  // Stationary: {root, table}. Explicit: one per transition.
  std::vector<EdgeTable> tables_;
  IntMatrix stationary_matrix_;
};

OrderedBratteliDiagram parse_diagram(std::string_view text);
OrderedBratteliDiagram load_diagram(const std::string& path);
std::string serialize_diagram(const OrderedBratteliDiagram& d);
ValidationReport validate(const OrderedBratteliDiagram& d, std::size_t depth);

IntVector heights(const OrderedBratteliDiagram& d, std::size_t m);

// Paths and cells.
void check_path(const OrderedBratteliDiagram& d, const Path& path);
std::size_t path_end(const Path& path);
std::variant<Path, MaxPath> vershik_successor(const OrderedBratteliDiagram& d, const Path& path);
Path min_path(const OrderedBratteliDiagram& d, std::size_t m, std::size_t vertex);
Path max_path(const OrderedBratteliDiagram& d, std::size_t m, std::size_t vertex);
BigInt floor_of(const OrderedBratteliDiagram& d, const Path& path);
Path path_of_cell(const OrderedBratteliDiagram& d, std::size_t m, std::size_t tower, const BigInt& floor);

// Level-`from` cell that contains the given level-`to` cell.
Cell project_cell(const OrderedBratteliDiagram& d, std::size_t to, const Cell& c, std::size_t from);
// All level-`to` cells inside the level-`from` cell (tower, floor), ascending.
std::vector<Cell> refine_cell(const OrderedBratteliDiagram& d, std::size_t from, const Cell& c, std::size_t to);
ClopenSet refine(const OrderedBratteliDiagram& d, const ClopenSet& u, std::size_t to);
// For every tower at level `to`, its level-`from` towers bottom to top as
// (tower, zero-based floor offset).
using TowerSegments = std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>>;
TowerSegments tower_segments(const OrderedBratteliDiagram& d, std::size_t from, std::size_t to);
ClopenSet whole_space(const OrderedBratteliDiagram& d, std::size_t m);
std::uint64_t cell_count(const OrderedBratteliDiagram& d, std::size_t m);

// The successor map read off at level `lookahead`. `fine[w][k-1]` is the
// image of level-lookahead cell (w,k), nullopt on a roof. Each entry of
// `roofs` is a level-m roof cell with the level-m images of its refinements
// (nullopt where the refinement is itself a roof at level `lookahead`).
struct TowerMap {
  std::size_t level = 0;
  std::size_t lookahead = 0;
  std::vector<std::vector<std::optional<Cell>>> fine;
  struct CoarseEntry {
    Cell cell;
    std::vector<std::pair<Cell, std::optional<Cell>>> refinements;
  };
  std::vector<CoarseEntry> roofs;
  std::size_t unresolved = 0;  // roof cells at level lookahead
};
TowerMap tower_map(const OrderedBratteliDiagram& d, std::size_t m, std::size_t lookahead);

// Successor of a level-m cell, or nullopt when it is a roof.
std::optional<Cell> cell_successor(const OrderedBratteliDiagram& d, std::size_t m, const Cell& c);

DgElement class_of_clopen(const OrderedBratteliDiagram& d, const ClopenSet& u);

}  // namespace bvk

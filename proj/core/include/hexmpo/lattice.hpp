#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hexmpo {

using Edge = std::pair<int, int>;  // stored sorted, a < b

/// Site-to-1D-position bijection ("snake" ordering).
struct SnakeOrder {
  std::vector<int> position;  // site -> 1D index
  std::vector<int> site;      // 1D index -> site

  int span(const Edge& e) const {
    return std::abs(position[e.first] - position[e.second]);
  }
};

/// Heavy-hex style lattice: degree <= 3, undirected, connected.
///
/// Bonds are partitioned into three "color groups" mirroring the device's
/// three disjoint two-qubit gate layers; the groups are applied in order
/// within each circuit round.
struct Lattice {
  int site_count = 0;
  std::vector<Edge> edges;                      // sorted, unique
  std::vector<std::array<double, 2>> coords;    // reporting only
  std::string name;
  std::map<std::string, int> labels;            // e.g. source/detector sites
  std::array<std::vector<Edge>, 3> color_groups;
  std::optional<SnakeOrder> snake;

  bool has_edge(int a, int b) const;
  std::vector<std::vector<int>> adjacency() const;
  int degree(int site) const;

  /// Throws std::invalid_argument when the heavy-hex invariants fail
  /// (self-loops, duplicate edges, degree > 3, disconnected graph).
  void validate() const;
};

/// One scheduled gate layer: bonds whose 1D spans are pairwise disjoint.
struct GateLayer {
  std::vector<Edge> bonds;
  std::vector<std::pair<int, int>> spans;  // per bond, closed [lo, hi] 1D positions
};

enum class LightconeMode {
  /// Commuting ZZ round: support advances one graph step per round.
  Standard,
  /// Non-commuting variant: one step per color group per round, replayed
  /// in conjugation order (reverse of the circuit's color order).
  NonCommuting,
};

Lattice build_eagle_127();
Lattice build_two_hexagon_21();
Lattice build_single_hexagon_12();

/// Named geometry lookup: "eagle127", "twohex21", "hex12", or "file:<path>".
Lattice build_geometry(const std::string& spec);

SnakeOrder snake_order(const Lattice& lat);

/// Partition all edges into layers with pairwise disjoint closed spans:
/// greedy interval scheduling per color group, groups concatenated in
/// circuit order. On Eagle with the canonical snake order this yields
/// exactly 13 layers.
std::vector<GateLayer> layer_bonds(const Lattice& lat, const SnakeOrder& order);

/// Like layer_bonds but for a subset of edges (one color group, or a
/// lightcone-restricted set).
std::vector<GateLayer> schedule_spans(const std::vector<Edge>& edges,
                                      const SnakeOrder& order);

std::vector<int> lightcone(const Lattice& lat, int site, int depth,
                           LightconeMode mode = LightconeMode::Standard);

/// Deterministic proper 3-edge-coloring (backtracking over sorted edges).
std::array<std::vector<Edge>, 3> color_edges(const std::vector<Edge>& edges);

std::string geometry_to_json(const Lattice& lat);
Lattice geometry_from_json(const std::string& json_text);
Lattice load_geometry_file(const std::string& path);
void save_geometry_file(const Lattice& lat, const std::string& path);

}  // namespace hexmpo

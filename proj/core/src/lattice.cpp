#include "hexmpo/lattice.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace hexmpo {

namespace {

Edge mk(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// ibm_kyiv Eagle connectivity: seven qubit rows joined by bridge qubits.
struct EagleTopo {
  std::vector<std::vector<int>> rows;
  // (bridge, top, bottom)
  std::vector<std::array<int, 3>> bridges;
};

EagleTopo eagle_topo() {
  EagleTopo t;
  auto range = [](int a, int b) {
    std::vector<int> v;
    for (int i = a; i < b; ++i) v.push_back(i);
    return v;
  };
  t.rows = {range(0, 14),   range(18, 33),  range(37, 52), range(56, 71),
            range(75, 90),  range(94, 109), range(113, 127)};
  t.bridges = {{14, 0, 18},    {15, 4, 22},    {16, 8, 26},    {17, 12, 30},
               {33, 20, 39},   {34, 24, 43},   {35, 28, 47},   {36, 32, 51},
               {52, 37, 56},   {53, 41, 60},   {54, 45, 64},   {55, 49, 68},
               {71, 58, 77},   {72, 62, 81},   {73, 66, 85},   {74, 70, 89},
               {90, 75, 94},   {91, 79, 98},   {92, 83, 102},  {93, 87, 106},
               {109, 96, 114}, {110, 100, 118}, {111, 104, 122}, {112, 108, 126}};
  return t;
}

// The three disjoint two-qubit layers of the device circuit, in circuit
// order (applied first, second, third within a round).
const std::vector<Edge>& eagle_group(int g) {
  static const std::vector<Edge> red = [] {
    std::vector<Edge> v;
    for (auto [a, b] : std::vector<std::pair<int, int>>{
             {2, 1},   {33, 39},  {59, 60},  {66, 67},  {72, 81},  {118, 119},
             {21, 20}, {26, 25},  {13, 12},  {31, 32},  {70, 74},  {122, 123},
             {96, 97}, {57, 56},  {63, 64},  {107, 108}, {103, 104}, {46, 45},
             {28, 35}, {7, 6},    {79, 78},  {5, 4},    {109, 114}, {62, 61},
             {58, 71}, {37, 52},  {76, 77},  {0, 14},   {36, 51},  {106, 105},
             {73, 85}, {88, 87},  {68, 55},  {116, 115}, {94, 95},  {100, 110},
             {17, 30}, {92, 102}, {50, 49},  {83, 84},  {48, 47},  {98, 99},
             {8, 9},   {121, 120}, {23, 24}, {44, 43},  {22, 15},  {53, 41}})
      v.push_back(mk(a, b));
    std::sort(v.begin(), v.end());
    return v;
  }();
  static const std::vector<Edge> blue = [] {
    std::vector<Edge> v;
    for (auto [a, b] : std::vector<std::pair<int, int>>{
             {53, 60},  {123, 124}, {21, 22},  {11, 12},  {67, 68},  {2, 3},
             {66, 65},  {122, 121}, {110, 118}, {6, 5},   {94, 90},  {28, 29},
             {14, 18},  {63, 62},  {111, 104}, {100, 99}, {45, 44},  {4, 15},
             {20, 19},  {57, 58},  {77, 71},  {76, 75},  {26, 27},  {16, 8},
             {35, 47},  {31, 30},  {48, 49},  {69, 70},  {125, 126}, {89, 74},
             {80, 79},  {116, 117}, {114, 113}, {10, 9},  {106, 93}, {101, 102},
             {92, 83},  {98, 91},  {82, 81},  {54, 64},  {96, 109}, {85, 84},
             {87, 86},  {108, 112}, {34, 24}, {42, 43},  {40, 41},  {39, 38}})
      v.push_back(mk(a, b));
    std::sort(v.begin(), v.end());
    return v;
  }();
  static const std::vector<Edge> green = [] {
    std::vector<Edge> v;
    for (auto [a, b] : std::vector<std::pair<int, int>>{
             {10, 11},  {54, 45},  {111, 122}, {64, 65},  {60, 61},  {103, 102},
             {72, 62},  {4, 3},    {33, 20},  {58, 59},  {26, 16},  {28, 27},
             {8, 7},    {104, 105}, {73, 66}, {87, 93},  {85, 86},  {55, 49},
             {68, 69},  {89, 88},  {80, 81},  {117, 118}, {101, 100}, {114, 115},
             {96, 95},  {29, 30},  {106, 107}, {83, 82},  {91, 79},  {0, 1},
             {56, 52},  {90, 75},  {126, 112}, {36, 32},  {46, 47},  {77, 78},
             {97, 98},  {17, 12},  {119, 120}, {22, 23},  {24, 25},  {43, 34},
             {42, 41},  {40, 39},  {37, 38},  {125, 124}, {50, 51},  {18, 19}})
      v.push_back(mk(a, b));
    std::sort(v.begin(), v.end());
    return v;
  }();
  switch (g) {
    case 0: return red;
    case 1: return blue;
    default: return green;
  }
}

}  // namespace

bool Lattice::has_edge(int a, int b) const {
  return std::binary_search(edges.begin(), edges.end(), mk(a, b));
}

std::vector<std::vector<int>> Lattice::adjacency() const {
  std::vector<std::vector<int>> adj(site_count);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& n : adj) std::sort(n.begin(), n.end());
  return adj;
}

int Lattice::degree(int site) const {
  int d = 0;
  for (const auto& [a, b] : edges) d += (a == site) + (b == site);
  return d;
}

void Lattice::validate() const {
  std::set<Edge> seen;
  for (const auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("lattice: self-loop");
    if (a < 0 || b >= site_count)
      throw std::invalid_argument("lattice: edge site out of range");
    if (!seen.insert(mk(a, b)).second)
      throw std::invalid_argument("lattice: duplicate edge");
  }
  auto adj = adjacency();
  for (int v = 0; v < site_count; ++v)
    if (adj[v].size() > 3)
      throw std::invalid_argument(
          fmt::format("lattice: site {} has degree {} > 3", v, adj[v].size()));
  // connectivity
  std::vector<char> vis(site_count, 0);
  std::deque<int> q{0};
  vis[0] = 1;
  int n = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (!vis[w]) {
        vis[w] = 1;
        ++n;
        q.push_back(w);
      }
  }
  if (n != site_count) throw std::invalid_argument("lattice: graph disconnected");
}

Lattice build_eagle_127() {
  Lattice lat;
  lat.name = "eagle127";
  lat.site_count = 127;
  auto topo = eagle_topo();
  for (const auto& row : topo.rows)
    for (size_t i = 0; i + 1 < row.size(); ++i)
      lat.edges.push_back(mk(row[i], row[i + 1]));
  for (const auto& [c, t, b] : topo.bridges) {
    lat.edges.push_back(mk(t, c));
    lat.edges.push_back(mk(c, b));
  }
  std::sort(lat.edges.begin(), lat.edges.end());

  lat.coords.resize(127);
  for (size_t r = 0; r < topo.rows.size(); ++r) {
    int col0 = (r == 6) ? 1 : 0;
    for (size_t i = 0; i < topo.rows[r].size(); ++i)
      lat.coords[topo.rows[r][i]] = {double(col0 + int(i)), 2.0 * double(r)};
  }
  for (const auto& [c, t, b] : topo.bridges)
    lat.coords[c] = {lat.coords[t][0], lat.coords[t][1] + 1.0};

  lat.color_groups = {eagle_group(0), eagle_group(1), eagle_group(2)};
  lat.labels = {{"z62", 62}, {"weight10_seed", 13}, {"weight17_seed", 58}};

  // Snake: serpentine over rows, bridge qubits interleaved immediately
  // before their lower attachment site.
  std::map<int, int> bridge_of_bottom;
  for (const auto& [c, t, b] : topo.bridges) bridge_of_bottom[b] = c;
  SnakeOrder ord;
  ord.site.reserve(127);
  for (size_t r = 0; r < topo.rows.size(); ++r) {
    auto row = topo.rows[r];
    if (r % 2 == 1) std::reverse(row.begin(), row.end());
    for (int s : row) {
      if (auto it = bridge_of_bottom.find(s); it != bridge_of_bottom.end())
        ord.site.push_back(it->second);
      ord.site.push_back(s);
    }
  }
  ord.position.assign(127, -1);
  for (int i = 0; i < 127; ++i) ord.position[ord.site[i]] = i;
  lat.snake = std::move(ord);
  lat.validate();
  return lat;
}

Lattice build_two_hexagon_21() {
  // Two heavy hexagons (12-cycles) fused along a corner-bridge-corner path.
  // Left ring: sites 0..11 in cycle order; shared path 10-11-0; right ring
  // adds sites 12..20. The double-slit source/detector pair sits antipodal
  // on the left ring.
  Lattice lat;
  lat.name = "twohex21";
  lat.site_count = 21;
  for (int i = 0; i < 12; ++i) lat.edges.push_back(mk(i, (i + 1) % 12));
  lat.edges.push_back(mk(0, 12));
  for (int i = 12; i < 20; ++i) lat.edges.push_back(mk(i, i + 1));
  lat.edges.push_back(mk(20, 10));
  std::sort(lat.edges.begin(), lat.edges.end());
  lat.labels = {{"source", 2}, {"detector", 8}, {"flux_a", 4}, {"flux_b", 5}};
  lat.color_groups = color_edges(lat.edges);

  lat.coords.resize(21);
  for (int i = 0; i < 12; ++i) {
    double a = 2.0 * 3.14159265358979323846 * i / 12.0;
    lat.coords[i] = {std::cos(a), std::sin(a)};
  }
  for (int i = 12; i < 21; ++i) {
    double a = 2.0 * 3.14159265358979323846 * (i - 12 + 1.5) / 12.0;
    lat.coords[i] = {2.0 - std::cos(a), -std::sin(a)};
  }

  SnakeOrder ord;
  ord.site = {11, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 19, 18, 17, 16, 15, 14, 13, 12};
  ord.position.assign(21, -1);
  for (int i = 0; i < 21; ++i) ord.position[ord.site[i]] = i;
  lat.snake = std::move(ord);
  lat.validate();
  return lat;
}

Lattice build_single_hexagon_12() {
  Lattice lat;
  lat.name = "hex12";
  lat.site_count = 12;
  for (int i = 0; i < 12; ++i) lat.edges.push_back(mk(i, (i + 1) % 12));
  std::sort(lat.edges.begin(), lat.edges.end());
  lat.color_groups = color_edges(lat.edges);
  lat.coords.resize(12);
  for (int i = 0; i < 12; ++i) {
    double a = 2.0 * 3.14159265358979323846 * i / 12.0;
    lat.coords[i] = {std::cos(a), std::sin(a)};
  }
  SnakeOrder ord;
  for (int i = 0; i < 12; ++i) ord.site.push_back(i);
  ord.position = ord.site;
  lat.snake = std::move(ord);
  lat.validate();
  return lat;
}

Lattice build_geometry(const std::string& spec) {
  if (spec == "eagle127") return build_eagle_127();
  if (spec == "twohex21") return build_two_hexagon_21();
  if (spec == "hex12") return build_single_hexagon_12();
  if (spec.rfind("file:", 0) == 0) return load_geometry_file(spec.substr(5));
  throw std::invalid_argument(fmt::format("unknown geometry '{}'", spec));
}

SnakeOrder snake_order(const Lattice& lat) {
  if (!lat.snake)
    throw std::invalid_argument(
        fmt::format("no snake order defined for geometry '{}'", lat.name));
  const auto& o = *lat.snake;
  if (int(o.site.size()) != lat.site_count)
    throw std::invalid_argument("snake order size mismatch");
  return o;
}

std::vector<GateLayer> schedule_spans(const std::vector<Edge>& edges,
                                      const SnakeOrder& order) {
  struct Item {
    int lo, hi;
    Edge e;
  };
  std::vector<Item> items;
  items.reserve(edges.size());
  for (const auto& e : edges) {
    int a = order.position[e.first], b = order.position[e.second];
    items.push_back({std::min(a, b), std::max(a, b), e});
  }
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    return std::tie(x.lo, x.hi, x.e) < std::tie(y.lo, y.hi, y.e);
  });
  // First fit gives the optimal layer count for interval graphs.
  std::vector<int> ends;
  for (const auto& it : items) {
    bool placed = false;
    for (auto& end : ends)
      if (end < it.lo) {
        end = it.hi;
        placed = true;
        break;
      }
    if (!placed) ends.push_back(it.hi);
  }
  const int k = int(ends.size());
  // Re-pack into the least-loaded compatible layer for balance.
  std::vector<GateLayer> layers(k);
  ends.assign(k, -1);
  for (const auto& it : items) {
    int best = -1;
    for (int i = 0; i < k; ++i)
      if (ends[i] < it.lo &&
          (best < 0 || layers[i].bonds.size() < layers[best].bonds.size()))
        best = i;
    if (best < 0) {  // cannot happen for intervals, guard anyway
      layers.emplace_back();
      ends.push_back(-1);
      best = int(layers.size()) - 1;
    }
    layers[best].bonds.push_back(it.e);
    layers[best].spans.emplace_back(it.lo, it.hi);
    ends[best] = it.hi;
  }
  return layers;
}

std::vector<GateLayer> layer_bonds(const Lattice& lat, const SnakeOrder& order) {
  std::vector<GateLayer> out;
  for (const auto& group : lat.color_groups) {
    auto sub = schedule_spans(group, order);
    for (auto& l : sub) out.push_back(std::move(l));
  }
  size_t total = 0;
  for (const auto& l : out) total += l.bonds.size();
  if (total != lat.edges.size())
    throw std::logic_error("layer_bonds: color groups do not cover all edges");
  return out;
}

std::vector<int> lightcone(const Lattice& lat, int site, int depth,
                           LightconeMode mode) {
  if (depth < 0) throw std::invalid_argument("lightcone: depth < 0");
  if (site < 0 || site >= lat.site_count)
    throw std::invalid_argument("lightcone: site out of range");
  std::vector<char> in(lat.site_count, 0);
  in[site] = 1;
  auto adj = lat.adjacency();
  auto grow_all = [&] {
    std::vector<int> add;
    for (int v = 0; v < lat.site_count; ++v)
      if (in[v])
        for (int w : adj[v])
          if (!in[w]) add.push_back(w);
    for (int w : add) in[w] = 1;
  };
  auto grow_group = [&](const std::vector<Edge>& g) {
    std::vector<int> add;
    for (const auto& [a, b] : g) {
      if (in[a] && !in[b]) add.push_back(b);
      if (in[b] && !in[a]) add.push_back(a);
    }
    for (int w : add) in[w] = 1;
  };
  for (int d = 0; d < depth; ++d) {
    if (mode == LightconeMode::Standard) {
      grow_all();
    } else {
      // Conjugation replays color groups in reverse circuit order.
      for (int g = 2; g >= 0; --g) grow_group(lat.color_groups[g]);
    }
  }
  std::vector<int> out;
  for (int v = 0; v < lat.site_count; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

std::array<std::vector<Edge>, 3> color_edges(const std::vector<Edge>& edges) {
  std::vector<Edge> es = edges;
  std::sort(es.begin(), es.end());
  std::vector<int> color(es.size(), -1);
  auto conflicts = [&](size_t i, size_t j) {
    return es[i].first == es[j].first || es[i].first == es[j].second ||
           es[i].second == es[j].first || es[i].second == es[j].second;
  };
  // Backtracking keeps this deterministic; heavy-hex graphs are class 1 so
  // three colors always suffice for degree-3 instances.
  std::function<bool(size_t)> bt = [&](size_t i) -> bool {
    if (i == es.size()) return true;
    for (int c = 0; c < 3; ++c) {
      bool ok = true;
      for (size_t j = 0; j < i && ok; ++j)
        if (color[j] == c && conflicts(i, j)) ok = false;
      if (!ok) continue;
      color[i] = c;
      if (bt(i + 1)) return true;
      color[i] = -1;
    }
    return false;
  };
  if (!bt(0)) throw std::runtime_error("color_edges: no proper 3-coloring found");
  std::array<std::vector<Edge>, 3> groups;
  for (size_t i = 0; i < es.size(); ++i) groups[color[i]].push_back(es[i]);
  return groups;
}

std::string geometry_to_json(const Lattice& lat) {
  nlohmann::json j;
  j["name"] = lat.name;
  auto& sites = j["sites"] = nlohmann::json::array();
  for (int i = 0; i < lat.site_count; ++i) {
    nlohmann::json s;
    s["id"] = i;
    if (i < int(lat.coords.size())) {
      s["x"] = lat.coords[i][0];
      s["y"] = lat.coords[i][1];
    }
    sites.push_back(s);
  }
  auto& ej = j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : lat.edges) ej.push_back({a, b});
  if (lat.snake) j["snake_order"] = lat.snake->site;
  j["labels"] = lat.labels;
  auto& cg = j["color_groups"] = nlohmann::json::array();
  for (const auto& g : lat.color_groups) {
    nlohmann::json gj = nlohmann::json::array();
    for (const auto& [a, b] : g) gj.push_back({a, b});
    cg.push_back(gj);
  }
  return j.dump(2);
}

Lattice geometry_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Lattice lat;
  lat.name = j.value("name", "custom");
  lat.site_count = int(j.at("sites").size());
  lat.coords.resize(lat.site_count, {0.0, 0.0});
  for (const auto& s : j.at("sites")) {
    int id = s.at("id").get<int>();
    if (s.contains("x")) lat.coords.at(id) = {s["x"].get<double>(), s["y"].get<double>()};
  }
  for (const auto& e : j.at("edges"))
    lat.edges.push_back(mk(e.at(0).get<int>(), e.at(1).get<int>()));
  std::sort(lat.edges.begin(), lat.edges.end());
  if (j.contains("labels"))
    for (auto& [k, v] : j["labels"].items()) lat.labels[k] = v.get<int>();
  if (j.contains("snake_order")) {
    SnakeOrder o;
    o.site = j["snake_order"].get<std::vector<int>>();
    o.position.assign(lat.site_count, -1);
    for (int i = 0; i < int(o.site.size()); ++i) o.position.at(o.site[i]) = i;
    lat.snake = std::move(o);
  }
  if (j.contains("color_groups")) {
    for (int g = 0; g < 3; ++g)
      for (const auto& e : j["color_groups"].at(g))
        lat.color_groups[g].push_back(mk(e.at(0).get<int>(), e.at(1).get<int>()));
  } else {
    lat.color_groups = color_edges(lat.edges);
  }
  lat.validate();
  return lat;
}

Lattice load_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open geometry file '{}'", path));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  return geometry_from_json(text);
}

void save_geometry_file(const Lattice& lat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << geometry_to_json(lat) << "\n";
}

}  // namespace hexmpo

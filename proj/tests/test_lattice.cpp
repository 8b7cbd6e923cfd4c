#include <doctest.h>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <functional>
#include <set>

#include "hexmpo/lattice.hpp"

using namespace hexmpo;

namespace {

int girth(const Lattice& lat) {
  auto adj = lat.adjacency();
  int best = 1 << 30;
  for (int s = 0; s < lat.site_count; ++s) {
    std::vector<int> dist(lat.site_count, -1), par(lat.site_count, -1);
    std::deque<int> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          par[w] = v;
          q.push_back(w);
        } else if (par[v] != w && par[w] != v) {
          best = std::min(best, dist[v] + dist[w] + 1);
        }
      }
    }
  }
  return best;
}

// count distinct simple cycles of a given length
int count_cycles(const Lattice& lat, int len) {
  auto adj = lat.adjacency();
  std::set<std::vector<int>> seen;
  std::vector<int> path;
  std::function<void(int, int)> dfs = [&](int start, int v) {
    if (int(path.size()) == len) {
      if (std::find(adj[v].begin(), adj[v].end(), start) != adj[v].end()) {
        auto key = path;
        std::sort(key.begin(), key.end());
        seen.insert(key);
      }
      return;
    }
    for (int w : adj[v]) {
      if (std::find(path.begin(), path.end(), w) != path.end()) continue;
      if (w < start) continue;  // canonical start = smallest site in cycle
      path.push_back(w);
      dfs(start, w);
      path.pop_back();
    }
  };
  for (int s = 0; s < lat.site_count; ++s) {
    path = {s};
    dfs(s, s);
  }
  return int(seen.size());
}

}  // namespace

TEST_CASE("eagle 127 geometry") {
  auto lat = build_eagle_127();
  CHECK(lat.site_count == 127);
  CHECK(lat.edges.size() == 144);
  std::set<int> degs;
  for (int v = 0; v < 127; ++v) degs.insert(lat.degree(v));
  CHECK(degs == std::set<int>{1, 2, 3});
  CHECK(girth(lat) == 12);
  CHECK(lat.labels.at("z62") == 62);
}

TEST_CASE("eagle color groups are matchings partitioning the edges") {
  auto lat = build_eagle_127();
  std::set<Edge> all;
  for (int g = 0; g < 3; ++g) {
    CHECK(lat.color_groups[g].size() == 48);
    std::set<int> touched;
    for (const auto& [a, b] : lat.color_groups[g]) {
      CHECK(touched.insert(a).second);
      CHECK(touched.insert(b).second);
      CHECK(all.insert({a, b}).second);
    }
  }
  CHECK(all == std::set<Edge>(lat.edges.begin(), lat.edges.end()));
}

TEST_CASE("eagle lightcone counts") {
  auto lat = build_eagle_127();
  auto c0 = lightcone(lat, 62, 0);
  CHECK(c0 == std::vector<int>{62});
  CHECK(lightcone(lat, 62, 7).size() == 54);
  CHECK(lightcone(lat, 62, 4, LightconeMode::NonCommuting).size() == 69);
}

TEST_CASE("lightcone monotonicity and saturation") {
  auto lat = build_eagle_127();
  size_t prev = 0;
  for (int d = 0; d <= 40; ++d) {
    auto c = lightcone(lat, 13, d);
    CHECK(c.size() >= prev);
    prev = c.size();
    if (d >= 1) {
      auto smaller = lightcone(lat, 13, d - 1);
      CHECK(std::includes(c.begin(), c.end(), smaller.begin(), smaller.end()));
    }
  }
  CHECK(prev == 127);
  CHECK_THROWS_AS(lightcone(lat, 13, -1), std::invalid_argument);
}

TEST_CASE("snake order is a bijection with inverse") {
  for (const auto& lat :
       {build_eagle_127(), build_two_hexagon_21(), build_single_hexagon_12()}) {
    auto o = snake_order(lat);
    std::set<int> seen(o.position.begin(), o.position.end());
    CHECK(int(seen.size()) == lat.site_count);
    for (int s = 0; s < lat.site_count; ++s) CHECK(o.site[o.position[s]] == s);
  }
}

TEST_CASE("eagle snake: max edge span frozen regression") {
  auto lat = build_eagle_127();
  auto o = snake_order(lat);
  int mx = 0;
  for (const auto& e : lat.edges) mx = std::max(mx, o.span(e));
  CHECK(mx == 36);
}

TEST_CASE("layer scheduling: 13 layers on eagle, disjoint spans, partition") {
  auto lat = build_eagle_127();
  auto o = snake_order(lat);
  auto layers = layer_bonds(lat, o);
  CHECK(layers.size() == 13);
  std::multiset<Edge> assigned;
  size_t size_min = 1000, size_max = 0;
  for (const auto& l : layers) {
    size_min = std::min(size_min, l.bonds.size());
    size_max = std::max(size_max, l.bonds.size());
    for (size_t i = 0; i < l.spans.size(); ++i)
      for (size_t j = i + 1; j < l.spans.size(); ++j) {
        bool disjoint = l.spans[i].second < l.spans[j].first ||
                        l.spans[j].second < l.spans[i].first;
        CHECK(disjoint);
      }
    for (const auto& e : l.bonds) assigned.insert(e);
  }
  CHECK(assigned.size() == 144);
  CHECK(std::set<Edge>(assigned.begin(), assigned.end()) ==
        std::set<Edge>(lat.edges.begin(), lat.edges.end()));
  CHECK(size_max - size_min <= 5);  // balanced greedy scheduling
}

TEST_CASE("two-hexagon geometry") {
  auto lat = build_two_hexagon_21();
  CHECK(lat.site_count == 21);
  CHECK(lat.edges.size() == 22);
  std::set<int> degs;
  for (int v = 0; v < 21; ++v) degs.insert(lat.degree(v));
  CHECK(degs == std::set<int>{2, 3});
  CHECK(count_cycles(lat, 12) == 2);
  REQUIRE(lat.labels.count("source") == 1);
  REQUIRE(lat.labels.count("detector") == 1);
  auto layers = layer_bonds(lat, snake_order(lat));
  size_t total = 0;
  for (const auto& l : layers) total += l.bonds.size();
  CHECK(total == 22);
}

TEST_CASE("single hexagon geometry") {
  auto lat = build_single_hexagon_12();
  CHECK(lat.site_count == 12);
  for (int v = 0; v < 12; ++v) CHECK(lat.degree(v) == 2);
  CHECK(count_cycles(lat, 12) == 1);
  for (const auto& [a, b] : lat.edges) CHECK((a + b) % 2 == 1);  // bipartite ring
  auto o = snake_order(lat);
  for (const auto& e : lat.edges) CHECK(o.span(e) <= 11);
  auto layers = layer_bonds(lat, o);
  size_t total = 0;
  for (const auto& l : layers) total += l.bonds.size();
  CHECK(total == 12);
}

TEST_CASE("geometry json round trip") {
  auto lat = build_two_hexagon_21();
  auto text = geometry_to_json(lat);
  auto back = geometry_from_json(text);
  CHECK(back.site_count == lat.site_count);
  CHECK(back.edges == lat.edges);
  CHECK(back.labels == lat.labels);
  CHECK(back.snake->site == lat.snake->site);
  CHECK(back.color_groups == lat.color_groups);
}

TEST_CASE("frozen eagle data file matches the builder") {
  // regenerate with: hexmpo geometry --geometry eagle127 --out data/eagle127.json
  const char* candidates[] = {"data/eagle127.json", "../data/eagle127.json",
                              "../../data/eagle127.json"};
  std::string found;
  for (const char* c : candidates)
    if (std::filesystem::exists(c)) found = c;
  REQUIRE_FALSE(found.empty());
  auto file = load_geometry_file(found);
  auto built = build_eagle_127();
  CHECK(file.edges == built.edges);
  CHECK(file.snake->site == built.snake->site);
  CHECK(file.color_groups == built.color_groups);
}

TEST_CASE("invalid geometries are rejected") {
  Lattice bad;
  bad.site_count = 4;
  bad.edges = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Lattice loop;
  loop.site_count = 2;
  loop.edges = {{1, 1}};
  CHECK_THROWS_AS(loop.validate(), std::invalid_argument);
  CHECK_THROWS_AS(build_geometry("nope"), std::invalid_argument);
}

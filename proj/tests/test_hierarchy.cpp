#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "phida/hierarchy.hpp"
#include "phida/mutual_knn.hpp"
#include "phida/ph_view.hpp"
#include "phida/synthetic.hpp"

using namespace phida;

namespace {

ComponentSummary summary(double support, Vector centroid, double pi = 0.0) {
  ComponentSummary s;
  s.support = support;
  s.centroid = std::move(centroid);
  s.persistence = pi;
  s.merge_weight = support;
  return s;
}

NeighborGraph path_graph(std::size_t n) {
  NeighborGraph g;
  g.node_ids.resize(n);
  g.retained.resize(n);
  g.candidate_distances.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.node_ids[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

}  // namespace

TEST_CASE("ph stable masses") {
  std::vector<ComponentSummary> s{summary(10, {0.0}, 3.0), summary(4, {1.0}, 1.0), summary(6, {2.0}, 1.0)};
  bool fb = true;
  const auto m = ph_stable_masses(s, &fb);
  CHECK_FALSE(fb);
  CHECK(m[0] == doctest::Approx(7.5));  // pi_ref = 1
  CHECK(m[1] == doctest::Approx(2.0));

  std::vector<ComponentSummary> equal{summary(8, {0.0}, 2.0), summary(2, {1.0}, 2.0)};
  const auto half = ph_stable_masses(equal);
  CHECK(half[0] == doctest::Approx(4.0));
  CHECK(half[1] == doctest::Approx(1.0));

  std::vector<ComponentSummary> zero{summary(8, {0.0}, 0.0), summary(2, {1.0}, 0.0)};
  const auto back = ph_stable_masses(zero, &fb);
  CHECK(fb);
  CHECK(back == std::vector<double>{8.0, 2.0});
}

TEST_CASE("entropy effective count and minimum retained count") {
  CHECK(entropy_effective_count(std::vector<double>{2, 2, 2, 2}) == doctest::Approx(4.0));
  CHECK(entropy_effective_count(std::vector<double>{5}) == doctest::Approx(1.0));
  CHECK(entropy_effective_count(std::vector<double>{3, 1}) == doctest::Approx(1.7548).epsilon(1e-4));
  CHECK(min_retained_count(1.7548, 2) == 2);
  CHECK(min_retained_count(5.0, 3) == 3);
  CHECK(min_retained_count(1.0, 7) == 1);
  CHECK(min_retained_count(3.0 + 1e-14, 9) == 3);
}

TEST_CASE("merge height") {
  CHECK(merge_height(1, 1, std::vector<double>{0}, std::vector<double>{2}) == doctest::Approx(2.0));
  CHECK(merge_height(2, 2, std::vector<double>{0, 0}, std::vector<double>{1, 0}) == doctest::Approx(1.0));
  CHECK(merge_height(3, 5, std::vector<double>{1}, std::vector<double>{1}) == 0.0);
}

TEST_CASE("agglomerate basics") {
  std::vector<ComponentSummary> one{summary(3, {0.0})};
  const auto h1 = agglomerate(one, NeighborGraph{}, 1);
  CHECK(h1.merge_count() == 0);
  CHECK(h1.levels.size() == 1);

  std::vector<ComponentSummary> two{summary(1, {0.0}), summary(1, {2.0})};
  const auto h2 = agglomerate(two, path_graph(2), 1);
  REQUIRE(h2.merge_count() == 1);
  CHECK(h2.merge_heights[0] == doctest::Approx(2.0));

  // A-B-C path with h(A,B) < h(B,C); A and C are not adjacent.
  std::vector<ComponentSummary> three{summary(1, {0.0}), summary(1, {1.0}), summary(1, {3.0})};
  const auto h3 = agglomerate(three, path_graph(3), 1);
  REQUIRE(h3.merge_count() == 2);
  CHECK(h3.merges[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(h3.levels[1] == std::vector<std::size_t>{0, 0, 2});

  // c_min stops the merging.
  CHECK(agglomerate(three, path_graph(3), 2).merge_count() == 1);
}

TEST_CASE("agglomerate never merges non-adjacent groups") {
  std::vector<ComponentSummary> s{summary(1, {0.0}), summary(1, {0.1}), summary(1, {50.0})};
  NeighborGraph g = path_graph(3);
  g.edges = {{1, 2}};
  const auto h = agglomerate(s, g, 1);
  REQUIRE(h.merge_count() == 1);
  CHECK(h.merges[0] == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("agglomerate first merge is the exhaustive minimum over adjacent pairs") {
  SplitMix64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng.below(12);
    std::vector<ComponentSummary> s;
    Points mu;
    for (std::size_t a = 0; a < k; ++a) {
      mu.push_back({rng.normal() * 4, rng.normal() * 4});
      s.push_back(summary(1 + rng.below(9), mu.back()));
    }
    const auto g = build_mutual_graph(mu, {}, TransformState::identity(2));
    if (g.edges.empty()) continue;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> arg;
    for (const auto& [a, b] : g.edges) {
      const double wa = s[a].merge_weight, wb = s[b].merge_weight;
      double d2 = 0;
      for (int j = 0; j < 2; ++j) d2 += (mu[a][j] - mu[b][j]) * (mu[a][j] - mu[b][j]);
      const double q = wa * wb / (wa + wb) * d2;
      if (q < best) {
        best = q;
        arg = {a, b};
      }
    }
    const auto h = agglomerate(s, g, 1);
    REQUIRE(h.merge_count() >= 1);
    CHECK(h.merges[0] == arg);
    CHECK(h.merge_heights[0] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("select cut") {
  ComponentHierarchy h;
  h.levels = {{0, 1, 2, 3}, {0, 0, 2, 3}, {0, 0, 0, 3}, {0, 0, 0, 0}};
  h.merge_heights = {1.0, 1.5, 5.0};
  CHECK(select_cut(h, 1) == 2);
  // Only level 0 has >= 4 groups.
  CHECK(select_cut(h, 4) == 0);
  // Equal gaps: prefer the larger upper height.
  h.merge_heights = {1.0, 2.0, 3.0};
  CHECK(select_cut(h, 1) == 2);
  ComponentHierarchy none;
  none.levels = {{0, 1}};
  CHECK(select_cut(none, 1) == 0);
}

TEST_CASE("expand mapping") {
  RawComponentPartition raw;
  raw.component_of = {1, 0, 1, 2};
  raw.components = {{1}, {0, 2}, {3}};
  ComponentHierarchy h;
  h.levels = {{0, 1, 2}, {0, 0, 2}, {0, 0, 0}};
  h.merge_heights = {1.0, 2.0};
  h.selected_level = 0;
  CHECK(expand_mapping(h, raw) == std::vector<std::size_t>{1, 2, 1, 3});
  h.selected_level = 2;
  CHECK(expand_mapping(h, raw) == std::vector<std::size_t>{1, 1, 1, 1});
  h.selected_level = 1;
  CHECK(expand_mapping(h, raw) == std::vector<std::size_t>{1, 1, 1, 2});
}

TEST_CASE("view over one tight blob yields one cluster") {
  SplitMix64 rng(9);
  Points reps;
  std::vector<NodeId> ids;
  std::vector<std::uint64_t> sup;
  for (std::size_t i = 0; i < 12; ++i) {
    reps.push_back({rng.normal() * 0.01, rng.normal() * 0.01});
    ids.push_back(i);
    sup.push_back(5);
  }
  const auto v = build_ph_view(ids, reps, sup, {}, PhBuildOptions{});
  CHECK(v.cluster_count() >= 1);
  for (std::size_t c : v.mapping) CHECK(c >= 1);
}

TEST_CASE("single-node view") {
  const auto v = build_ph_view(std::vector<NodeId>{7}, Points{{1.0, 2.0}}, std::vector<std::uint64_t>{3}, {},
                               PhBuildOptions{});
  CHECK(v.cluster_count() == 1);
  CHECK(v.input_ids == std::vector<NodeId>{7});
}

#include <doctest.h>

#include "sgaug/core_model.hpp"
#include "sgaug/errors.hpp"
#include "support.hpp"

using namespace sgaug;
using sgaug::testing::make_graph;

namespace {

// person=0, surfboard=1, wave=2, with the wave node at index 3 as in
// "(3, above, 1), (1, on, 2)".
SceneGraph surf_graph() {
  return make_graph("surf", {0, 0, 1, 2}, {{3, 1, 1}, {1, 0, 2}});
}

Vocabulary surf_vocab() { return Vocabulary({"person", "surfboard", "wave"}, {"on", "above"}); }

}  // namespace

TEST_CASE("vocabulary assigns positional ids") {
  Vocabulary v({"person", "dog"}, {"on"});
  CHECK(v.find_object("person") == 0u);
  CHECK(v.find_object("dog") == 1u);
  CHECK(v.find_predicate("on") == 0u);
  CHECK_FALSE(v.find_object("cat").has_value());
  CHECK_THROWS_AS(Vocabulary({"a", ""}, {"on"}), InvalidArgument);
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {"on"}), InvalidArgument);
  CHECK_THROWS_AS(Vocabulary({}, {"on"}), InvalidArgument);
}

TEST_CASE("degree counts both roles") {
  const SceneGraph g = surf_graph();
  CHECK(degree(g, 1) == 2);
  CHECK(degree(g, 0) == 0);
  CHECK_THROWS_AS(degree(g, 4), InvalidArgument);

  const SceneGraph h = make_graph("h", {0, 0, 0, 0}, {{0, 0, 1}, {0, 0, 2}, {3, 0, 0}});
  CHECK(degree(h, 0) == 3);
  CHECK(incident_edges(h, 0) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("degree sum is twice the edge count") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const SceneGraph g = sgaug::testing::random_graph("g", rng, 5, 3, 7, 12);
    std::size_t sum = 0;
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) sum += degree(g, i);
    CHECK(sum == 2 * g.num_edges());
  }
}

TEST_CASE("categorical triplets follow node categories") {
  const auto t = categorical_triplets(surf_graph());
  REQUIRE(t.size() == 2);
  const Vocabulary v = surf_vocab();
  CHECK(v.object_name(t[0].subject) == "wave");
  CHECK(v.predicate_name(t[0].predicate) == "above");
  CHECK(v.object_name(t[0].object) == "person");
  CHECK(v.object_name(t[1].subject) == "person");
  CHECK(v.predicate_name(t[1].predicate) == "on");
  CHECK(v.object_name(t[1].object) == "surfboard");

  CHECK(categorical_triplets(make_graph("e", {0, 1}, {})).empty());
  const auto dup = categorical_triplets(make_graph("d", {0, 1}, {{0, 0, 1}, {0, 0, 1}}));
  CHECK(dup.size() == 2);
  CHECK(dup[0] == dup[1]);
}

TEST_CASE("relabeling changes exactly the incident triplets") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const SceneGraph g = sgaug::testing::random_graph("g", rng, 6, 3, 6, 10);
    const NodeIndex node = rng.uniform_index(g.num_nodes());
    const CategoryId next = (g.category(node) + 1) % 6;
    const auto before = categorical_triplets(g);
    const auto after = categorical_triplets(g.relabeled(node, next));
    for (std::size_t k = 0; k < before.size(); ++k) {
      const auto& e = g.edges()[k];
      const bool incident = e.subject == node || e.object == node;
      CHECK((before[k] != after[k]) == incident);
    }
  }
}

TEST_CASE("scene graph construction rejects broken structure") {
  CHECK_THROWS_AS(make_graph("x", {0, 1}, {{0, 0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(make_graph("x", {0, 1}, {{0, 0, 2}}), InvalidArgument);
  CHECK_THROWS_AS(SceneGraph("x", 0.0, 10.0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(SceneGraph("x", 10.0, 10.0, {{0, {5, 5, 5, 6}}}, {}), InvalidArgument);
  const SceneGraph g = make_graph("x", {0, 7}, {});
  CHECK_THROWS_AS(validate(g, surf_vocab()), InvalidArgument);
  CHECK_NOTHROW(validate(surf_graph(), surf_vocab()));
}

TEST_CASE("with_edges keeps nodes and selected edges") {
  const SceneGraph g = surf_graph();
  const SceneGraph h = g.with_edges({1});
  CHECK(h.num_nodes() == 4);
  REQUIRE(h.num_edges() == 1);
  CHECK(h.edges()[0] == g.edges()[1]);
}

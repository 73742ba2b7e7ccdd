#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "produpd/error.hpp"
#include "produpd/harness.hpp"
#include "produpd/model.hpp"
#include "produpd/semantics.hpp"

using namespace produpd;
using fixtures::f;

namespace {

KripkeModel rename(const KripkeModel& m, const std::vector<WorldId>& names) {
  const auto edges = m.edges();
  return KripkeModel(names, edges, m.valuation());
}

// Same shape after reading world i of `a` as world i of `b`.
bool same_up_to_names(const KripkeModel& a, const KripkeModel& b) {
  return a.size() == b.size() && rename(a, b.worlds()) == b;
}

void check_against_oracle(const TaggedModel& got, const oracle::Model& want) {
  REQUIRE(got.model.size() == want.size());
  CHECK(got.model.worlds() == want.names);
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(static_cast<int>(got.tags[i]) == want.tag[i]);
    for (std::size_t j = 0; j < want.size(); ++j) CHECK(got.model.has_edge(i, j) == want.rel[i][j]);
  }
  for (const auto& [p, bits] : want.val) CHECK(got.model.value(p) == oracle::as_set(bits));
}

std::vector<EventModel> sample_event_models(std::size_t count, std::uint64_t seed) {
  FuzzConfig cfg;
  cfg.seed = seed;
  std::vector<EventModel> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_event_model(cfg, i));
  return out;
}

const char* const kChain = R"({"worlds":["w0","w1","w2"],"rel":[["w0","w1"],["w1","w2"]],"val":{"p":["w2"]}})";

}  // namespace

TEST_CASE("valuation override") {
  const KripkeModel m = fixtures::product_example_model();
  CHECK(with_valuation(m, "p", m.none()).value("p").empty());
  CHECK(with_valuation(m, "p", m.all()).value("p").is_full());
  CHECK(with_valuation(m, "p", m.value("p")) == m);
  CHECK(with_valuation(m, "q", m.all()).value("p") == m.value("p"));
  CHECK_THROWS_AS(with_valuation(m, "p", WorldSet(3)), Error);
}

TEST_CASE("relativisation") {
  const KripkeModel m = fixtures::model(R"({"worlds":["w0","w1"],"rel":[["w0","w1"]],"val":{"p":["w1"]}})");
  CHECK(relativise(m, m.all()) == m);
  CHECK(relativise(m, m.none()).empty());

  const KripkeModel r = relativise(m, fixtures::worlds(m, {"w1"}));
  CHECK(r.worlds() == std::vector<WorldId>{"w1"});
  CHECK(r.edge_count() == 0);
  CHECK(r.value("p").is_full());
  CHECK_THROWS_AS(relativise(m, WorldSet(5)), Error);
}

TEST_CASE("product update examples") {
  const KripkeModel m = fixtures::product_example_model();

  SUBCASE("skip model") {
    const EventModel skip = fixtures::events(R"({"events":["a0"],"rel":[["a0","a0"]],"pre":{"a0":"true"}})");
    const TaggedModel out = product_update(m, skip);
    CHECK(same_up_to_names(out.model, m));
    CHECK(out.model.worlds() == std::vector<WorldId>{"(w0,a0)", "(w1,a0)"});
    CHECK(out.tags == std::vector<std::size_t>{0, 0});
    CHECK(out.origin == std::vector<std::size_t>{0, 1});
  }

  SUBCASE("two events") {
    const EventModel a = fixtures::product_example_events();
    const TaggedModel out = product_update(m, a);
    check_against_oracle(out, oracle::product(oracle::from(m), oracle::from(a)));
    CHECK(out.model.worlds() == std::vector<WorldId>{"(w0,a0)", "(w0,a1)", "(w1,a1)"});
    CHECK(out.model.edges() == std::vector<Edge>{{0, 2}, {1, 2}, {2, 2}});
    CHECK(out.model.value("p") == fixtures::worlds(out.model, {"(w0,a0)", "(w0,a1)"}));
    CHECK(product_world(out, 0, 0) == 0u);
    CHECK(product_world(out, 1, 0) == std::nullopt);
    CHECK(product_world(out, 1, 1) == 2u);
  }

  SUBCASE("unsatisfiable precondition") {
    const EventModel never = fixtures::events(R"({"events":["a0"],"rel":[["a0","a0"]],"pre":{"a0":"false"}})");
    const TaggedModel out = product_update(m, never);
    CHECK(out.model.empty());
    CHECK(out.tags.empty());
  }
}

TEST_CASE("generated submodels") {
  const KripkeModel chain = fixtures::model(kChain);

  SUBCASE("radius zero has no edges") {
    const KripkeModel loop = fixtures::model(R"({"worlds":["w0"],"rel":[["w0","w0"]],"val":{"p":["w0"]}})");
    const PointedModel pm = generated_submodel_k(loop, 0, 0);
    CHECK(pm.model.size() == 1);
    CHECK(pm.model.edge_count() == 0);
    CHECK(pm.model.value("p").is_full());
  }
  SUBCASE("radius one on a chain") {
    const PointedModel pm = generated_submodel_k(chain, 0, 1);
    CHECK(pm.model.worlds() == std::vector<WorldId>{"w0", "w1"});
    CHECK(pm.model.edges() == std::vector<Edge>{{0, 1}});
    CHECK(pm.model.world(pm.point) == "w0");
  }
  SUBCASE("large radius saturates") {
    CHECK(generated_submodel_k(chain, 0, 3).model == chain);
    CHECK(generated_submodel_k(chain, 1, 7).model.worlds() == std::vector<WorldId>{"w1", "w2"});
  }
  SUBCASE("radius two keeps edges inside the ball") {
    const KripkeModel m = fixtures::model(
        R"({"worlds":["a","b","c","d"],"rel":[["a","b"],["b","c"],["c","a"],["c","d"],["b","b"]],"val":{}})");
    const PointedModel pm = generated_submodel_k(m, 0, 1);
    CHECK(pm.model.worlds() == std::vector<WorldId>{"a", "b"});
    CHECK(pm.model.edges() == std::vector<Edge>{{0, 1}, {1, 1}});
    const PointedModel two = generated_submodel_k(m, 0, 2);
    CHECK(two.model.worlds() == std::vector<WorldId>{"a", "b", "c"});
    CHECK(two.model.edge_count() == 4);
  }
  CHECK_THROWS_AS(generated_submodel_k(chain, 5, 1), Error);
}

TEST_CASE("announcement event models") {
  const KripkeModel m = fixtures::product_example_model();
  const EventModel top = announcement_event_model(Formula::top());
  CHECK(top.size() == 1);
  CHECK(top.has_edge(0, 0));
  CHECK(top.pre(0) == Formula::top());

  const TaggedModel byp = product_update(m, announcement_event_model(f("p")));
  CHECK(same_up_to_names(byp.model, relativise(m, extension(m, f("p")))));

  CHECK(product_update(m, announcement_event_model(Formula::bottom())).model.empty());
  CHECK_THROWS_AS(announcement_event_model(f("<a0> p")), Error);
  CHECK_THROWS_AS(announcement_event_model(f("j0")), Error);
}

TEST_CASE("model validation") {
  const std::vector<Edge> bad_edge{{0, 3}};
  CHECK_THROWS_AS(KripkeModel({"w0"}, bad_edge, {}), Error);
  CHECK_THROWS_AS(KripkeModel::from_names({"w0", "w0"}, {}, {}), Error);
  CHECK_THROWS_AS(KripkeModel::from_names({"w0"}, {{"w0", "x"}}, {}), Error);
  CHECK_THROWS_AS(KripkeModel::from_names({"w0"}, {}, {{"p", {"x"}}}), Error);
  CHECK_THROWS_AS(EventModel({}, {}, {}), Error);
  CHECK_THROWS_AS(EventModel::from_names({"a"}, {}, {{"a", f("<a> p")}}), Error);
  CHECK_THROWS_AS(EventModel::from_names({"a", "a"}, {}, {{"a", f("p")}}), Error);
  CHECK(fixtures::product_example_model().require("w1") == 1);
  CHECK_THROWS_AS(fixtures::product_example_model().require("w7"), Error);
}

TEST_CASE("cloning a world") {
  const KripkeModel m = fixtures::product_example_model();
  const KripkeModel c = clone_world(m, 1, "w1c");
  CHECK(c.size() == 3);
  CHECK(c.has_edge(0, 2));
  CHECK(c.has_edge(2, 1));
  CHECK(c.has_edge(1, 2));
  CHECK_FALSE(c.has_edge(2, 2));
  const oracle::Model om = oracle::from(m);
  const oracle::Model oc = oracle::from(c);
  CHECK(oracle::is_bisimulation(om, oc, {{0, 0}, {1, 1}, {1, 2}}));
}

TEST_CASE("property: products match the enumeration of world and event pairs") {
  const auto models = fixtures::sample_models(150, 4, 31);
  const auto events = sample_event_models(150, 32);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const TaggedModel out = product_update(models[i], events[i]);
    check_against_oracle(out, oracle::product(oracle::from(models[i]), oracle::from(events[i])));

    CHECK(out.model.size() <= models[i].size() * events[i].size());
    bool all_global = true;
    for (const Formula& pre : events[i].preconditions()) all_global = all_global && extension(models[i], pre).is_full();
    CHECK((out.model.size() == models[i].size() * events[i].size()) == all_global);
  }
}

TEST_CASE("property: announcement products are relativisations") {
  FormulaShape shape;
  shape.max_size = 8;
  shape.max_quantifiers = 1;
  const auto models = fixtures::sample_models(150, 4, 41);
  const auto announced = fixtures::sample(150, shape, 42);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const TaggedModel out = product_update(models[i], announcement_event_model(announced[i]));
    const KripkeModel rel = relativise(models[i], extension(models[i], announced[i]));
    CHECK(same_up_to_names(out.model, rel));
  }
}

TEST_CASE("property: relativisation composes") {
  const auto models = fixtures::sample_models(100, 5, 51);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const KripkeModel& m = models[i];
    Rng rng(51, i, "subsets");
    WorldSet a = m.none();
    for (std::size_t w = 0; w < m.size(); ++w) {
      if (rng.chance(0.7)) a.set(w);
    }
    const KripkeModel ma = relativise(m, a);
    WorldSet b_in_a = ma.none();
    WorldSet b_in_m = m.none();
    for (std::size_t w = 0; w < ma.size(); ++w) {
      if (!rng.chance(0.6)) continue;
      b_in_a.set(w);
      b_in_m.set(m.require(ma.world(w)));
    }
    CHECK(relativise(ma, b_in_a) == relativise(m, a & b_in_m));
  }
}

TEST_CASE("property: generated submodels are idempotent at fixed radius") {
  const auto models = fixtures::sample_models(100, 5, 61);
  for (const KripkeModel& m : models) {
    for (std::size_t w = 0; w < m.size(); ++w) {
      for (std::size_t k = 0; k <= 3; ++k) {
        const PointedModel base = generated_submodel_k(m, w, k);
        for (std::size_t k2 = k; k2 <= k + 2; ++k2) {
          const PointedModel wide = generated_submodel_k(m, w, k2);
          const PointedModel again = generated_submodel_k(wide.model, wide.point, k);
          CHECK(again.model == base.model);
          CHECK(again.model.world(again.point) == m.world(w));
        }
      }
    }
  }
}

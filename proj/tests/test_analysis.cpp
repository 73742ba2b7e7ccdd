#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "produpd/analysis.hpp"
#include "produpd/error.hpp"
#include "produpd/harness.hpp"
#include "produpd/semantics.hpp"

using namespace produpd;
using fixtures::f;

namespace {

const char* const kLoop = R"({"worlds":["w"],"rel":[["w","w"]],"val":{"p":["w"]}})";
const char* const kCycle = R"({"worlds":["u","v"],"rel":[["u","v"],["v","u"]],"val":{"p":["u","v"]}})";

Bisimulation from_pairs(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Bisimulation z;
  z.pairs.insert(pairs.begin(), pairs.end());
  return z;
}

Bisimulation identity(const KripkeModel& m) {
  Bisimulation z;
  for (std::size_t i = 0; i < m.size(); ++i) z.pairs.emplace(i, i);
  return z;
}

ErrorCode code_of(const std::function<void()>& action) {
  try {
    action();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("bisimulation examples") {
  const KripkeModel loop = fixtures::model(kLoop);
  const KripkeModel cycle = fixtures::model(kCycle);

  CHECK(greatest_bisimulation(loop, cycle).pairs == from_pairs({{0, 0}, {0, 1}}).pairs);
  CHECK(is_bisimulation(loop, cycle, from_pairs({{0, 0}, {0, 1}})));
  CHECK_FALSE(is_bisimulation(loop, cycle, from_pairs({{0, 0}})));

  const KripkeModel m = fixtures::product_example_model();
  const Bisimulation self = greatest_bisimulation(m, m);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(self.contains(i, i));
  CHECK(is_bisimulation(m, m, identity(m)));
  CHECK(is_bisimulation(m, m, Bisimulation{}));
  CHECK_FALSE(is_bisimulation(m, m, from_pairs({{0, 1}})));

  const KripkeModel empty_p = fixtures::model(R"({"worlds":["w"],"rel":[["w","w"]],"val":{}})");
  CHECK(greatest_bisimulation(loop, empty_p).pairs.empty());
}

TEST_CASE("lifting a bisimulation through a product") {
  const KripkeModel loop = fixtures::model(kLoop);
  const KripkeModel cycle = fixtures::model(kCycle);
  const EventModel a = fixtures::product_example_events();

  SUBCASE("identity through the skip model") {
    const KripkeModel m = fixtures::product_example_model();
    const EventModel skip = fixtures::events(R"({"events":["a0"],"rel":[["a0","a0"]],"pre":{"a0":"true"}})");
    const LiftedBisimulation y = lift_bisimulation(identity(m), skip, m, m);
    CHECK(y.relation.pairs == identity(y.left.model).pairs);
  }

  SUBCASE("loop and two-cycle") {
    const LiftedBisimulation y = lift_bisimulation(greatest_bisimulation(loop, cycle), a, loop, cycle);
    REQUIRE(y.left.model.worlds() == std::vector<WorldId>{"(w,a0)", "(w,a1)"});
    REQUIRE(y.right.model.worlds() == std::vector<WorldId>{"(u,a0)", "(u,a1)", "(v,a0)", "(v,a1)"});
    CHECK(y.relation.pairs == from_pairs({{0, 0}, {0, 2}, {1, 1}, {1, 3}}).pairs);
    CHECK(is_bisimulation(y.left.model, y.right.model, y.relation));
    CHECK(oracle::is_bisimulation(oracle::from(y.left.model), oracle::from(y.right.model),
                                  {y.relation.pairs.begin(), y.relation.pairs.end()}));
  }

  SUBCASE("rejects relations that are not bisimulations") {
    const KripkeModel empty_p = fixtures::model(R"({"worlds":["w"],"rel":[["w","w"]],"val":{}})");
    CHECK(code_of([&] { lift_bisimulation(from_pairs({{0, 0}}), a, loop, empty_p); }) ==
          ErrorCode::NotABisimulation);
  }
}

TEST_CASE("degree checks") {
  const KripkeModel split = fixtures::model(R"({"worlds":["w0","w1"],"rel":[],"val":{"p":["w0"]}})");
  std::vector<PointedModel> testset;
  for (const KripkeModel& m : fixtures::sample_models(20, 5, 5)) testset.push_back({m, 0});

  CHECK(check_degree(f("[] p"), 1, testset).verdict == DegreeVerdict::ConsistentOnTestSet);
  CHECK(check_degree(f("p"), 0, testset).verdict == DegreeVerdict::ConsistentOnTestSet);

  std::vector<PointedModel> with_split = testset;
  with_split.push_back({split, 0});
  for (std::size_t k : {0u, 1u, 4u}) {
    const DegreeCheckResult r = check_degree(f("U p"), k, with_split);
    CHECK(r.verdict == DegreeVerdict::Counterexample);
    REQUIRE(r.witness_index.has_value());
    REQUIRE(r.counterexample.has_value());
    CHECK(holds(r.counterexample->model, r.counterexample->point, f("U p")) == r.value_on_full);
    CHECK(r.value_on_full != r.value_on_submodel);
    if (*r.witness_index == testset.size()) {
      CHECK_FALSE(r.value_on_full);
      CHECK(r.value_on_submodel);
    }
  }

  const nlohmann::json j = to_json(check_degree(f("U p"), 0, {{split, 0}}));
  CHECK(j["verdict"] == "Counterexample");
  CHECK(j["k"] == 0);
  CHECK(j["formula"] == "U p");
}

TEST_CASE("k star") {
  CHECK(k_star({1, 2}, 3) == 5);
  CHECK(k_star({0}, 0) == 0);
  CHECK(k_star({2}, 0) == 2);
  CHECK(code_of([] { k_star({}, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("named submodels") {
  const KripkeModel m = fixtures::product_example_model();
  CHECK(is_named_submodel(generated_submodel_k(m, 0, 0).model, m));
  CHECK(is_named_submodel(m, m));
  const KripkeModel extra_edge = fixtures::model(R"({"worlds":["w0"],"rel":[["w0","w0"]],"val":{"p":["w0"]}})");
  CHECK_FALSE(is_named_submodel(extra_edge, m));
  const KripkeModel extra_atom = fixtures::model(R"({"worlds":["w1"],"rel":[],"val":{"p":["w1"]}})");
  CHECK_FALSE(is_named_submodel(extra_atom, m));
}

TEST_CASE("bisimulation JSON") {
  const KripkeModel loop = fixtures::model(kLoop);
  const KripkeModel cycle = fixtures::model(kCycle);
  CHECK(to_json(greatest_bisimulation(loop, cycle), loop, cycle).dump() == R"([["w","u"],["w","v"]])");
}

TEST_CASE("property: greatest bisimulation is the union of all bisimulations") {
  FuzzConfig cfg;
  cfg.seed = 161;
  cfg.max_props = 1;
  std::size_t nonempty = 0;
  std::size_t compared = 0;
  for (std::size_t i = 0; i < 80; ++i) {
    Rng rng(161, i, "bisim");
    const KripkeModel m1 = random_model(cfg, rng, 3);
    const KripkeModel m2 = random_model(cfg, rng, i % 4 == 0 ? 5 : 3);
    if (m1.size() * m2.size() > 16) continue;
    const Bisimulation z = greatest_bisimulation(m1, m2);
    const auto want = oracle::union_of_all_bisimulations(oracle::from(m1), oracle::from(m2));
    CHECK(z.pairs == std::set<std::pair<std::size_t, std::size_t>>(want.begin(), want.end()));
    CHECK(is_bisimulation(m1, m2, z));
    ++compared;
    if (!z.pairs.empty()) ++nonempty;
    for (std::size_t s = 0; s < m1.size(); ++s) {
      for (std::size_t t = 0; t < m2.size(); ++t) {
        if (z.contains(s, t)) continue;
        Bisimulation bigger = z;
        bigger.pairs.emplace(s, t);
        CHECK_FALSE(is_bisimulation(m1, m2, bigger));
      }
    }
  }
  CHECK(compared > 60);
  CHECK(nonempty > 10);
}

TEST_CASE("property: evaluation is invariant under bisimulation") {
  FuzzConfig cfg;
  cfg.seed = 171;
  FormulaShape shape;
  shape.max_size = 12;
  shape.actions = true;
  shape.announcements = true;
  shape.nu = true;
  for (std::size_t i = 0; i < 150; ++i) {
    Rng rng(171, i, "invariance");
    const KripkeModel m = random_model(cfg, rng, 4);
    const KripkeModel c = clone_world(m, rng.below(m.size()), "copy");
    const EventModel a = random_event_model(cfg, i);
    const Bisimulation z = greatest_bisimulation(m, c);
    const LiftedBisimulation y = lift_bisimulation(z, a, m, c);
    CHECK(is_bisimulation(y.left.model, y.right.model, y.relation));

    const Formula phi = random_shaped_formula(rng, proposition_names(3), shape, &a);
    const WorldSet left = extension(m, phi, {}, &a);
    const WorldSet right = extension(c, phi, {}, &a);
    for (const auto& [s, t] : z.pairs) CHECK(left.test(s) == right.test(t));
  }
}

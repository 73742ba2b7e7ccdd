#include <doctest.h>

#include "fixtures.hpp"
#include "produpd/error.hpp"
#include "produpd/harness.hpp"
#include "produpd/parser.hpp"
#include "produpd/semantics.hpp"
#include "produpd/translator.hpp"

using namespace produpd;
using fixtures::f;

namespace {

FuzzConfig small_config(std::uint64_t seed, std::size_t cases) {
  FuzzConfig cfg;
  cfg.seed = seed;
  cfg.cases = cases;
  cfg.degree_testset = 5;
  return cfg;
}

// A broken event translation: the left conjunct, usually the precondition,
// is dropped.
Formula lossy_translation(const EventModel& a, std::size_t alpha, const Formula& psi) {
  const Formula chi = translate_event(a, alpha, psi);
  return chi.is(Connective::And) ? chi.right() : chi;
}

PinnedCase from_failure(const FailureCase& fc) {
  PinnedCase c{fc.model, fc.events, fc.formula, fc.announced, {}, {}};
  return c;
}

}  // namespace

TEST_CASE("configuration validation") {
  FuzzConfig ok;
  CHECK_NOTHROW(ok.validate());
  FuzzConfig bad = ok;
  bad.cases = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.max_worlds = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.max_events = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.edge_probability = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.edge_probability = -0.1;
  CHECK_THROWS_AS(run_fuzz(bad), Error);
}

TEST_CASE("suite names") {
  for (Suite s : all_suites()) CHECK(suite_from_string(to_string(s)) == s);
  CHECK(std::string(to_string(Suite::BisimLift)) == "bisim_lift");
  CHECK_THROWS_AS(suite_from_string("nope"), Error);
  CHECK(all_suites().size() == 6);
}

TEST_CASE("random streams") {
  Rng a(1, 2, "x");
  Rng b(1, 2, "x");
  Rng c(1, 3, "x");
  Rng d(1, 2, "y");
  const std::uint64_t first = a.next();
  CHECK(first == b.next());
  CHECK(first != c.next());
  CHECK(first != d.next());
  Rng r(9, 0, "range");
  for (int i = 0; i < 1000; ++i) {
    const std::size_t v = r.between(3, 5);
    CHECK(v >= 3);
    CHECK(v <= 5);
    CHECK(r.below(7) < 7);
  }
  CHECK_FALSE(r.chance(0.0));
  CHECK(r.chance(1.0));
  CHECK(proposition_names(7) == std::vector<PropName>{"p", "q", "r", "s", "t", "p5", "p6"});
}

TEST_CASE("generators respect their bounds") {
  FuzzConfig cfg = small_config(3, 1);
  cfg.max_worlds = 3;
  cfg.max_events = 2;
  cfg.max_props = 2;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const KripkeModel m = random_model(cfg, i);
    CHECK(m.size() >= 1);
    CHECK(m.size() <= 3);
    for (const auto& [p, _] : m.valuation()) CHECK((p == "p" || p == "q"));

    const EventModel a = random_event_model(cfg, i);
    CHECK(a.size() <= 2);
    bool has_top = false;
    for (const Formula& pre : a.preconditions()) {
      CHECK(classify(pre) == LanguageTag::BaseMso);
      CHECK(quantifier_nodes(pre) == 0);
      CHECK(pre.size() <= 4);
      has_top = has_top || pre == Formula::top();
    }
    CHECK(has_top);

    const Formula phi = random_formula(cfg, i, LanguageTag::ScopedNominals);
    CHECK(phi.size() <= cfg.max_formula_size);
    CHECK(quantifier_count(phi) <= cfg.max_eps);
    CHECK_FALSE(contains(phi, Connective::Action));

    const Formula mu = random_formula(cfg, i, LanguageTag::MuFragment);
    CHECK(classify(mu) == LanguageTag::MuFragment);

    Rng rng(3, i, "body");
    const Formula body = random_positive_body(rng, {"p", "q"}, "p", 8);
    CHECK(body.size() <= 8);
    CHECK(polarity(body, "p") != Polarity::Negative);
    CHECK(polarity(body, "p") != Polarity::Mixed);
  }
  CHECK(random_model(cfg, 17) == random_model(cfg, 17));
  CHECK(random_formula(cfg, 17, LanguageTag::BaseMso) == random_formula(cfg, 17, LanguageTag::BaseMso));
}

TEST_CASE("pinned cases") {
  const KripkeModel m = fixtures::product_example_model();
  const EventModel a = fixtures::product_example_events();

  SUBCASE("translation of the product example") {
    std::vector<PinnedCase> cases;
    for (const char* text : {"p", "[] p", "exists q. (q & <> q)", "(j0 | <> j1)", "U (p -> j0)"}) {
      cases.push_back(PinnedCase{m, a, f(text), std::nullopt, {}, {}});
    }
    const SuiteReport r = run_pinned(Suite::Translation, cases);
    CHECK(r.passed == cases.size());
    CHECK(r.failed == 0);
    CHECK(r.checks > 0);
  }

  SUBCASE("other suites") {
    CHECK(run_pinned(Suite::Announcement, {PinnedCase{m, std::nullopt, f("exists q. [] q"), f("p"), {}, {}}}).failed ==
          0);
    CHECK(run_pinned(Suite::Nominals, {PinnedCase{m, a, Formula::top(), std::nullopt, {}, {}}}).failed == 0);
    CHECK(run_pinned(Suite::Fixpoint, {PinnedCase{m, std::nullopt, f("nu q. (p | <> q)"), std::nullopt, {}, {}}})
              .failed == 0);
    CHECK(run_pinned(Suite::BisimLift, {PinnedCase{m, a, f("<a0> <> p"), std::nullopt, {1}, {}}}).failed == 0);
    std::vector<PointedModel> testset{{m, 0}, {m, 1}};
    CHECK(run_pinned(Suite::Degree, {PinnedCase{m, a, f("[] p"), std::nullopt, {}, testset}}).failed == 0);
  }
}

TEST_CASE("injected faults are caught and shrunk") {
  FuzzHooks hooks;
  hooks.translate_event = lossy_translation;

  FuzzConfig cfg = small_config(5, 200);
  cfg.suites = {Suite::Translation};
  const FuzzReport report = run_fuzz(cfg, hooks);
  CHECK_FALSE(report.ok());
  const SuiteReport* sr = report.find(Suite::Translation);
  REQUIRE(sr != nullptr);
  CHECK(sr->failed > 0);
  REQUIRE(sr->first_failure.has_value());
  const FailureRecord& rec = *sr->first_failure;
  CHECK(rec.shrunk.model.size() <= rec.original.model.size());
  CHECK(rec.shrunk.formula.size() <= rec.original.formula.size());
  CHECK(rec.shrink_steps > 0);
  CHECK_FALSE(rec.shrunk.message.empty());

  CHECK(run_pinned(Suite::Translation, {from_failure(rec.shrunk)}, cfg, hooks).failed == 1);
  CHECK(run_pinned(Suite::Translation, {from_failure(rec.shrunk)}, cfg).failed == 0);
  CHECK(run_pinned(Suite::Translation, {from_failure(rec.original)}, cfg, hooks).failed == 1);

  SUBCASE("announcement faults") {
    FuzzHooks bad;
    bad.translate_announcement = [](const Formula& announced, const Formula& psi) {
      return Formula::conj(announced, psi);
    };
    FuzzConfig acfg = small_config(6, 300);
    acfg.suites = {Suite::Announcement};
    const FuzzReport ar = run_fuzz(acfg, bad);
    REQUIRE(ar.find(Suite::Announcement) != nullptr);
    const SuiteReport& s = *ar.find(Suite::Announcement);
    CHECK(s.failed > 0);
    REQUIRE(s.first_failure.has_value());
    CHECK(run_pinned(Suite::Announcement, {from_failure(s.first_failure->shrunk)}, acfg, bad).failed == 1);
  }
}

TEST_CASE("fuzzing is deterministic") {
  FuzzConfig cfg = small_config(11, 40);
  const FuzzReport a = run_fuzz(cfg);
  const FuzzReport b = run_fuzz(cfg);
  CHECK(a.ok());
  CHECK(to_json(a, false).dump() == to_json(b, false).dump());
  CHECK(to_json(a).contains("timing"));
  CHECK_FALSE(to_json(a, false).contains("timing"));
  for (const SuiteReport& s : a.suites) CHECK(s.passed == 40);
  CHECK(a.termination.calls > 0);
  CHECK(a.termination.violations == 0);
  CHECK(a.blowup.samples > 0);
  CHECK(a.blowup.max_size_ratio >= a.blowup.mean_size_ratio);

  FuzzConfig other = cfg;
  other.seed = 12;
  CHECK(to_json(run_fuzz(other), false).dump() != to_json(a, false).dump());
}

TEST_CASE("suites run on several seeds") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    FuzzConfig cfg = small_config(seed, 60);
    cfg.max_formula_size = 14;
    const FuzzReport r = run_fuzz(cfg);
    CHECK(r.ok());
    if (!r.ok()) MESSAGE(to_json(r, false).dump(2));
  }
}

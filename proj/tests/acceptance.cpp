// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "produpd/error.hpp"
#include "produpd/harness.hpp"
#include "produpd/parser.hpp"
#include "produpd/semantics.hpp"
#include "produpd/translator.hpp"

using namespace produpd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

FuzzConfig base_config(Suite suite, std::size_t cases) {
  FuzzConfig cfg;
  cfg.seed = 42;
  cfg.cases = cases;
  cfg.suites = {suite};
  return cfg;
}

std::string describe(const SuiteReport& r) {
  std::ostringstream s;
  s << r.passed << "/" << (r.passed + r.failed) << " passed, " << r.checks << " checks, " << r.seconds
    << " s total, slowest case " << r.max_case_seconds << " s";
  if (r.first_failure) s << "; first failure: " << r.first_failure->shrunk.message;
  return s.str();
}

Outcome suite_outcome(const FuzzConfig& cfg, std::size_t expected) {
  const FuzzReport report = run_fuzz(cfg);
  const SuiteReport& r = report.suites.at(0);
  return {r.failed == 0 && r.passed == expected, describe(r)};
}

// Calls f on every model with 1..max_worlds worlds over the given props.
void each_small_model(std::size_t max_worlds, const std::vector<PropName>& props,
                      const std::function<void(const KripkeModel&)>& f) {
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    std::vector<WorldId> worlds;
    for (std::size_t i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
    const std::size_t edge_bits = n * n;
    const std::size_t val_bits = n * props.size();
    for (std::size_t r = 0; r < (std::size_t{1} << edge_bits); ++r) {
      std::vector<Edge> edges;
      for (std::size_t c = 0; c < edge_bits; ++c) {
        if ((r >> c) & 1u) edges.emplace_back(c / n, c % n);
      }
      for (std::size_t v = 0; v < (std::size_t{1} << val_bits); ++v) {
        std::map<PropName, WorldSet> val;
        for (std::size_t k = 0; k < props.size(); ++k) {
          WorldSet s(n);
          for (std::size_t i = 0; i < n; ++i) {
            if ((v >> (k * n + i)) & 1u) s.set(i);
          }
          val.emplace(props[k], s);
        }
        f(KripkeModel(worlds, edges, val));
      }
    }
  }
}

Outcome translation_soundness() {
  const FuzzConfig cfg = base_config(Suite::Translation, 1000);
  const FuzzReport report = run_fuzz(cfg);
  const SuiteReport& r = report.suites.at(0);
  const bool ok = r.failed == 0 && r.passed == 1000 && r.seconds < 300.0 && r.max_case_seconds < 1.0;
  return {ok, describe(r)};
}

Outcome fixpoints() {
  FuzzConfig cfg = base_config(Suite::Fixpoint, 500);
  cfg.max_worlds = 4;
  cfg.fixpoint_body_size = 8;
  return suite_outcome(cfg, 500);
}

Outcome degree() {
  FuzzConfig cfg = base_config(Suite::Degree, 300);
  cfg.degree_testset = 20;
  cfg.degree_max_worlds = 5;
  return suite_outcome(cfg, 300);
}

Outcome termination() {
  FuzzConfig cfg = base_config(Suite::Translation, 1000);
  const FuzzReport report = run_fuzz(cfg);
  std::ostringstream s;
  s << report.termination.calls << " recursive calls, " << report.termination.violations << " violations";
  return {report.ok() && report.termination.calls > 0 && report.termination.violations == 0, s.str()};
}

Outcome singleton_schema() {
  const Formula corrected = singleton_point_schema("p", Formula::atom("p")).formula;
  const Formula literal = singleton_point_schema("p", Formula::atom("p"), SchemaVariant::Literal).formula;
  std::size_t models = 0;
  std::size_t wrong = 0;
  each_small_model(3, {"q"}, [&](const KripkeModel& m) {
    ++models;
    if (!extension(m, corrected).is_full()) ++wrong;
    if (!extension(m, literal).empty()) ++wrong;
  });
  const KripkeModel one({"w0"}, {}, {});
  const bool literal_empty = extension(one, literal).empty();
  const bool corrected_full = extension(one, corrected).is_full();
  std::ostringstream s;
  s << "literal on one world: " << (literal_empty ? "empty" : "nonempty")
    << ", corrected on one world: " << (corrected_full ? "full" : "not full") << ", " << models
    << " small models, " << wrong << " mismatches";
  return {literal_empty && corrected_full && wrong == 0, s.str()};
}

Outcome round_trips() {
  FuzzConfig cfg;
  cfg.seed = 42;
  FormulaShape shape;
  shape.max_size = 16;
  shape.max_quantifiers = 2;
  shape.nominals = 3;
  shape.actions = true;
  shape.announcements = true;
  shape.nu = true;
  std::size_t formula_failures = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    Rng rng(42, i, "round-trip");
    const EventModel a = random_event_model(cfg, i);
    const Formula phi = random_shaped_formula(rng, proposition_names(4), shape, &a);
    try {
      if (!(parse_formula(print_formula(phi)) == phi)) ++formula_failures;
    } catch (const Error&) {
      ++formula_failures;
    }
  }
  std::size_t json_failures = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const std::string model_once = to_json(random_model(cfg, i)).dump();
    if (to_json(parse_model(model_once)).dump() != model_once) ++json_failures;
    const std::string events_once = to_json(random_event_model(cfg, i)).dump();
    if (to_json(parse_event_model(events_once)).dump() != events_once) ++json_failures;
  }
  std::ostringstream s;
  s << "10000 formulas, " << formula_failures << " failures; 2000 JSON documents, " << json_failures << " failures";
  return {formula_failures == 0 && json_failures == 0, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"translation soundness", translation_soundness},
      {"relativisation closure", [] { return suite_outcome(base_config(Suite::Announcement, 1000), 1000); }},
      {"nominal axioms", [] { return suite_outcome(base_config(Suite::Nominals, 1000), 1000); }},
      {"fixpoint agreement", fixpoints},
      {"bisimulation lift", [] { return suite_outcome(base_config(Suite::BisimLift, 300), 300); }},
      {"degree preservation", degree},
      {"termination measure", termination},
      {"singleton schema", singleton_schema},
      {"parser round trip", round_trips},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

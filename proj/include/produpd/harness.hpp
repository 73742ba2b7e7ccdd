#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "produpd/budget.hpp"
#include "produpd/formula.hpp"
#include "produpd/model.hpp"

namespace produpd {

enum class Suite { Translation, Announcement, Nominals, Fixpoint, BisimLift, Degree };

const char* to_string(Suite suite);
/// Throws InvalidArgument for unknown names.
Suite suite_from_string(std::string_view name);
std::vector<Suite> all_suites();

struct FuzzConfig {
  std::uint64_t seed = 0;
  std::size_t cases = 100;
  std::size_t max_worlds = 4;
  std::size_t max_events = 3;
  std::size_t max_props = 3;
  std::size_t max_formula_size = 12;
  std::size_t max_eps = 2;
  double edge_probability = 0.5;
  std::vector<Suite> suites = all_suites();

  /// Size bound of nu bodies in the fixpoint suite.
  std::size_t fixpoint_body_size = 8;
  /// Pointed models per degree case, and their world bound.
  std::size_t degree_testset = 20;
  std::size_t degree_max_worlds = 5;

  EvalBudget budget;

  /// Throws InvalidArgument when cases, max_worlds or max_events is zero,
  /// or edge_probability lies outside [0, 1].
  void validate() const;
};

/// Deterministic stream keyed by (seed, case index, label). Streams with
/// different keys are independent, so cases can be generated in any order.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t case_index, std::string_view label);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be positive.
  std::size_t below(std::size_t n);
  /// Uniform in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p);

 private:
  std::mt19937_64 engine_;
};

/// The first `count` proposition names used by the generators: p, q, r, s, t,
/// then p5, p6, ...
std::vector<PropName> proposition_names(std::size_t count);

KripkeModel random_model(const FuzzConfig& cfg, std::uint64_t case_index);
KripkeModel random_model(const FuzzConfig& cfg, Rng& rng, std::size_t max_worlds);

/// Preconditions are quantifier-free static formulas of size at most 4. One
/// event always has precondition `true`.
EventModel random_event_model(const FuzzConfig& cfg, std::uint64_t case_index);
/// `local` drops the global modalities from preconditions.
EventModel random_event_model(const FuzzConfig& cfg, Rng& rng, bool local);

/// language is BaseMso, ScopedNominals (static formulas plus nominals below
/// max_events) or MuFragment. Size at most max_formula_size, at most max_eps
/// quantifiers.
Formula random_formula(const FuzzConfig& cfg, std::uint64_t case_index, LanguageTag language);

/// Shape knobs for the general formula generator.
struct FormulaShape {
  std::size_t max_size = 12;
  std::size_t max_quantifiers = 0;
  std::size_t nominals = 0;
  bool global = true;
  bool nu = false;
  bool actions = false;
  bool announcements = false;
  /// Restrict to nu, box, diamond, Boolean connectives and atoms.
  bool mu_only = false;
};

/// Props are drawn from `props`; action modalities use events of `events`.
Formula random_shaped_formula(Rng& rng, const std::vector<PropName>& props, const FormulaShape& shape,
                              const EventModel* events = nullptr);

/// Body of size at most max_size, positive in `var`, for nu var. body.
Formula random_positive_body(Rng& rng, const std::vector<PropName>& props, const PropName& var,
                             std::size_t max_size);

/// Test-only overrides of the translations under test.
struct FuzzHooks {
  std::function<Formula(const EventModel&, std::size_t, const Formula&)> translate_event;
  std::function<Formula(const Formula&, const Formula&)> translate_announcement;
};

struct FailureCase {
  std::uint64_t case_index = 0;
  std::string message;
  KripkeModel model;
  std::optional<EventModel> events;
  Formula formula;
  std::optional<Formula> announced;
  std::string lhs;
  std::string rhs;
};

struct FailureRecord {
  FailureCase original;
  FailureCase shrunk;
  std::size_t shrink_steps = 0;
};

struct SuiteReport {
  Suite suite = Suite::Translation;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t checks = 0;
  std::optional<FailureRecord> first_failure;
  double seconds = 0;
  double max_case_seconds = 0;
};

struct BlowupStats {
  std::size_t samples = 0;
  double mean_size_ratio = 0;
  double max_size_ratio = 0;
  double mean_output_eps = 0;
  std::size_t max_output_eps = 0;
};

struct TerminationStats {
  std::size_t calls = 0;
  std::size_t violations = 0;
};

struct FuzzReport {
  FuzzConfig config;
  std::vector<SuiteReport> suites;
  BlowupStats blowup;
  TerminationStats termination;

  bool ok() const;
  const SuiteReport* find(Suite suite) const;
};

FuzzReport run_fuzz(const FuzzConfig& cfg, const FuzzHooks& hooks = {});

/// A hand-built case for one suite. `events` is needed by the translation,
/// nominals, bisimulation and degree suites, `announced` by the announcement
/// suite. `clones` lists the worlds duplicated to build a bisimilar partner;
/// `testset` holds the pointed models of a degree case.
struct PinnedCase {
  KripkeModel model;
  std::optional<EventModel> events;
  Formula formula;
  std::optional<Formula> announced;
  std::vector<std::size_t> clones;
  std::vector<PointedModel> testset;
};

/// Runs the checks of `suite` on the given cases, in order, with the budget
/// and bounds of cfg. Failures are shrunk as in run_fuzz.
SuiteReport run_pinned(Suite suite, const std::vector<PinnedCase>& cases, const FuzzConfig& cfg = {},
                       const FuzzHooks& hooks = {});

/// Timing fields are emitted under "timing" only when include_timing is set,
/// so the rest of the document is a pure function of the configuration.
nlohmann::json to_json(const FuzzReport& report, bool include_timing = true);

}  // namespace produpd

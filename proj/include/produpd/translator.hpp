#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "produpd/formula.hpp"
#include "produpd/model.hpp"

namespace produpd {

/// The lexicographic termination measure of a translation call: number of
/// propositional quantifiers first, then AST size.
struct Measure {
  std::size_t eps = 0;
  std::size_t size = 0;

  friend auto operator<=>(const Measure&, const Measure&) = default;
};

Measure measure_of(const Formula& phi);

/// Called once per recursive call of the event translation with the measure
/// of the caller's argument and of the callee's argument.
using MeasureObserver = std::function<void(const Measure& parent, const Measure& child)>;

struct TranslationStep {
  std::string rule;
  std::string at;
};

struct TranslateOptions {
  MeasureObserver observer;
  /// Apply Boolean constant folding to the final output.
  bool simplify = false;
};

struct TranslationReport {
  Formula input;
  Formula output;
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  std::size_t input_eps = 0;
  std::size_t output_eps = 0;
  std::vector<TranslationStep> steps;
  bool simplified = false;
};

nlohmann::json to_json(const TranslationReport& report);

/// Static formula equivalent to <alpha> psi. psi may contain nominals but no
/// action, announcement or nu nodes. Throws InputNotSentenceFragment or
/// UnknownEvent.
Formula translate_event(const EventModel& a, std::size_t alpha, const Formula& psi,
                        const TranslateOptions& options = {});
Formula translate_event(const EventModel& a, const EventName& alpha, const Formula& psi,
                        const TranslateOptions& options = {});

/// Static formula equivalent to <!announced> psi. psi may not contain action
/// or nu nodes; nominals are passed through as atoms of the current context.
Formula translate_announcement(const Formula& announced, const Formula& psi);

/// Removes nu, announcement and action nodes, innermost first. Actions refer
/// to events of `a`. Throws InputNotSentenceFragment when a nominal is not
/// under an action.
TranslationReport eliminate_all(const EventModel& a, const Formula& phi, const TranslateOptions& options = {});
/// Same, for formulas without action modalities (UnknownEvent otherwise).
TranslationReport eliminate_all(const Formula& phi, const TranslateOptions& options = {});

/// exists p. (p & U(p -> body)).
Formula encode_nu(const PropName& var, const Formula& body);

enum class SchemaVariant { Corrected, Literal };

struct SingletonSchema {
  Formula formula;
  /// True when the emitted schema adds the non-emptiness guard on the
  /// universally quantified set.
  bool guarded = false;
};

/// Second-order rendering of a first-order point quantifier over `var`:
/// exists var. (E var & "var is a singleton" & body). The literal variant
/// omits the guard on the inner quantifier and is unsatisfiable.
SingletonSchema singleton_point_schema(const PropName& var, const Formula& body,
                                       SchemaVariant variant = SchemaVariant::Corrected);

}  // namespace produpd

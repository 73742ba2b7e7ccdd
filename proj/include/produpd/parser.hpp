#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "produpd/formula.hpp"
#include "produpd/model.hpp"

namespace produpd {

struct ParseOptions {
  /// Accept `_`-prefixed proposition names. They are reserved for generated
  /// names, so user input rejects them by default.
  bool allow_reserved = false;
};

/// Parses the ASCII formula syntax. Throws ParseError (with span and expected
/// tokens) on syntax errors and PositivityViolation on non-positive nu bodies.
Formula parse_formula(std::string_view text, const ParseOptions& options = {});

/// Fully parenthesised rendering; parse_formula(print_formula(f)) == f.
std::string print_formula(const Formula& phi);

bool is_identifier(std::string_view name);

KripkeModel parse_model(std::string_view json_text);
EventModel parse_event_model(std::string_view json_text);

KripkeModel model_from_json(const nlohmann::json& j);
EventModel event_model_from_json(const nlohmann::json& j);

/// Normalised serialisations: worlds and events in declaration order, pairs in
/// index order, proposition keys sorted, valuation lists in world order.
nlohmann::json to_json(const KripkeModel& m);
nlohmann::json to_json(const EventModel& a);
/// Model JSON plus a "tags" object mapping each world to its event.
nlohmann::json to_json(const TaggedModel& m, const EventModel& a);

}  // namespace produpd

#pragma once

#include <cstddef>

#include "produpd/budget.hpp"
#include "produpd/formula.hpp"
#include "produpd/model.hpp"
#include "produpd/world_set.hpp"

namespace produpd {

/// The set of worlds of m satisfying phi. Action modalities refer to events of
/// `events` by name; nominals read the tags of m.
///
/// Propositional quantifiers enumerate subsets of the domain in bit-counting
/// order over the world ordering and stop as soon as every world has a
/// witness. Announcements relativise, actions build the product, and nu is
/// computed by descending iteration from the full domain.
///
/// Errors: PositivityViolation, NominalOutsideProductContext, UnknownEvent,
/// BudgetExceeded.
WorldSet extension(const TaggedModel& m, const Formula& phi, const EvalBudget& budget = {},
                   const EventModel* events = nullptr);
WorldSet extension(const KripkeModel& m, const Formula& phi, const EvalBudget& budget = {},
                   const EventModel* events = nullptr);

bool holds(const TaggedModel& m, std::size_t world, const Formula& phi, const EvalBudget& budget = {},
           const EventModel* events = nullptr);
bool holds(const KripkeModel& m, std::size_t world, const Formula& phi, const EvalBudget& budget = {},
           const EventModel* events = nullptr);

/// Union of all post-fixpoints X of body (X subset of [[body]] under p -> X),
/// found by enumerating every subset of the domain. Cross-check for nu.
WorldSet gfp_oracle(const KripkeModel& m, const PropName& p, const Formula& body, const EvalBudget& budget = {},
                    const EventModel* events = nullptr);

/// F(X) = [[body]] in m[p -> X].
WorldSet apply_body(const KripkeModel& m, const PropName& p, const Formula& body, const WorldSet& x,
                    const EvalBudget& budget = {}, const EventModel* events = nullptr);

}  // namespace produpd

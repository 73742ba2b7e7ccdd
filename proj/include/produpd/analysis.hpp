#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "produpd/budget.hpp"
#include "produpd/formula.hpp"
#include "produpd/model.hpp"

namespace produpd {

/// A relation between the worlds of two models, by index.
struct Bisimulation {
  std::set<std::pair<std::size_t, std::size_t>> pairs;

  bool contains(std::size_t left, std::size_t right) const { return pairs.count({left, right}) != 0; }
};

/// Largest bisimulation between m1 and m2, by refinement of the relation of
/// all atom-agreeing pairs.
Bisimulation greatest_bisimulation(const KripkeModel& m1, const KripkeModel& m2);

/// Checks the atom, forth and back clauses on every pair.
bool is_bisimulation(const KripkeModel& m1, const KripkeModel& m2, const Bisimulation& z);

struct LiftedBisimulation {
  TaggedModel left;
  TaggedModel right;
  Bisimulation relation;
};

/// Relates (s, b) to (t, b) whenever s Z t and both pair worlds exist in the
/// products. Throws NotABisimulation if z is not one.
LiftedBisimulation lift_bisimulation(const Bisimulation& z, const EventModel& a, const KripkeModel& m1,
                                     const KripkeModel& m2, const EvalBudget& budget = {});

enum class DegreeVerdict { ConsistentOnTestSet, Counterexample };

struct DegreeCheckResult {
  Formula formula;
  std::size_t k = 0;
  DegreeVerdict verdict = DegreeVerdict::ConsistentOnTestSet;
  std::optional<std::size_t> witness_index;
  std::optional<PointedModel> counterexample;
  bool value_on_full = false;
  bool value_on_submodel = false;
};

/// Compares phi at each test point against phi on the radius-k generated
/// submodel. The first disagreement, by test set order, is the counterexample.
DegreeCheckResult check_degree(const Formula& phi, std::size_t k, const std::vector<PointedModel>& testset,
                               const EvalBudget& budget = {}, const EventModel* events = nullptr);

/// max(deg_pres) + deg_phi. Throws InvalidArgument on an empty list.
std::size_t k_star(const std::vector<std::size_t>& deg_pres, std::size_t deg_phi);

/// True when every world, edge and valuation entry of `sub` appears, by
/// world name, in `super`.
bool is_named_submodel(const KripkeModel& sub, const KripkeModel& super);

nlohmann::json to_json(const Bisimulation& z, const KripkeModel& m1, const KripkeModel& m2);
nlohmann::json to_json(const DegreeCheckResult& result);

}  // namespace produpd

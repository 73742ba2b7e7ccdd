#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "produpd/budget.hpp"
#include "produpd/formula.hpp"
#include "produpd/world_set.hpp"

namespace produpd {

using WorldId = std::string;
using EventId = std::string;
using Edge = std::pair<std::size_t, std::size_t>;

/// Finite relational model over indexed worlds. Internally-empty models are
/// representable; only parsed input models are required to be non-empty.
class KripkeModel {
 public:
  KripkeModel() = default;
  /// Throws DuplicateWorld, UnknownWorldInRelation or UnknownWorldInValuation.
  KripkeModel(std::vector<WorldId> worlds, std::span<const Edge> edges, std::map<PropName, WorldSet> valuation);

  /// Builds a model from world names; validation errors name the offending world.
  static KripkeModel from_names(std::vector<WorldId> worlds,
                                const std::vector<std::pair<WorldId, WorldId>>& edges,
                                const std::map<PropName, std::vector<WorldId>>& valuation);

  std::size_t size() const noexcept { return worlds_.size(); }
  bool empty() const noexcept { return worlds_.empty(); }
  const std::vector<WorldId>& worlds() const noexcept { return worlds_; }
  const WorldId& world(std::size_t i) const { return worlds_.at(i); }
  std::optional<std::size_t> index_of(const WorldId& w) const;
  /// Index of w, or WorldOutOfModel.
  std::size_t require(const WorldId& w) const;

  const std::vector<std::size_t>& successors(std::size_t i) const { return successors_.at(i); }
  bool has_edge(std::size_t from, std::size_t to) const;
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  const std::map<PropName, WorldSet>& valuation() const noexcept { return valuation_; }
  /// Extension of p; the empty set for propositions the model does not mention.
  WorldSet value(const PropName& p) const;

  WorldSet all() const { return WorldSet::full(size()); }
  WorldSet none() const { return WorldSet(size()); }

  /// Structural equality; valuation entries with empty extension are ignored.
  friend bool operator==(const KripkeModel& a, const KripkeModel& b);

 private:
  std::vector<WorldId> worlds_;
  std::unordered_map<WorldId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> successors_;
  std::map<PropName, WorldSet> valuation_;
};

struct PointedModel {
  KripkeModel model;
  std::size_t point = 0;
};

/// Finite event model. Event order fixes nominal numbering: j_i names events()[i].
class EventModel {
 public:
  /// Throws EmptyEventSet, DuplicateEvent, UnknownEventInRelation, or
  /// PreconditionNotBaseMso.
  EventModel(std::vector<EventId> events, std::span<const Edge> edges, std::vector<Formula> preconditions);

  static EventModel from_names(std::vector<EventId> events, const std::vector<std::pair<EventId, EventId>>& edges,
                               const std::map<EventId, Formula>& preconditions);

  std::size_t size() const noexcept { return events_.size(); }
  const std::vector<EventId>& events() const noexcept { return events_; }
  const EventId& event(std::size_t i) const { return events_.at(i); }
  std::optional<std::size_t> index_of(const EventId& e) const;
  const std::vector<std::size_t>& successors(std::size_t i) const { return successors_.at(i); }
  bool has_edge(std::size_t from, std::size_t to) const;
  std::vector<Edge> edges() const;
  const Formula& pre(std::size_t i) const { return pre_.at(i); }
  const std::vector<Formula>& preconditions() const noexcept { return pre_; }
  /// Union of the proposition names mentioned by any precondition.
  const std::set<PropName>& precondition_props() const noexcept { return pre_props_; }

 private:
  std::vector<EventId> events_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<Formula> pre_;
  std::set<PropName> pre_props_;
};

/// A model whose worlds may carry the event that produced them. `tags` is
/// empty for base models, otherwise it holds one event index per world.
/// `origin` records, for product worlds, the base world they pair.
struct TaggedModel {
  KripkeModel model;
  std::vector<std::size_t> tags;
  std::vector<std::size_t> origin;

  bool tagged() const noexcept { return !tags.empty(); }
};

/// M[p -> x]. Throws WorldOutOfModel if x is over a different universe.
KripkeModel with_valuation(const KripkeModel& m, const PropName& p, const WorldSet& x);

/// M|A: keeps the worlds in `a`, intersecting the relation and valuation.
KripkeModel relativise(const KripkeModel& m, const WorldSet& a);
TaggedModel relativise(const TaggedModel& m, const WorldSet& a);

/// Assembles M (x) A from precomputed precondition extensions, one per event.
/// Worlds are ordered by base world, then event, and named "(w,a)".
TaggedModel product_from_extensions(const KripkeModel& m, const EventModel& a, std::span<const WorldSet> pre_ext);

/// Index of the pair world (w, e) in a product, or nullopt when w does not
/// satisfy the precondition of e.
std::optional<std::size_t> product_world(const TaggedModel& product, std::size_t w, std::size_t e);

/// M (x) A. Preconditions are evaluated on m within `budget`.
TaggedModel product_update(const KripkeModel& m, const EventModel& a, const EvalBudget& budget = {});

/// The submodel reachable from w in at most k steps. Radius 0 keeps no edges;
/// for k >= 1 the relation is restricted to the ball.
PointedModel generated_submodel_k(const KripkeModel& m, std::size_t w, std::size_t k);

/// One-event model ({a0}, {(a0,a0)}, Pre = announced) encoding relativisation.
EventModel announcement_event_model(const Formula& announced);

/// Adds a copy of world w with the same valuation, the same successors, and
/// every edge into w duplicated into the copy. The result is bisimilar to m.
KripkeModel clone_world(const KripkeModel& m, std::size_t w, const WorldId& name);

}  // namespace produpd

#include "produpd/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>

#include "produpd/error.hpp"
#include "produpd/semantics.hpp"

namespace produpd {

EvalBudget budget_from_environment() {
  EvalBudget budget;
  if (const char* env = std::getenv("PRODUPD_BUDGET_WORLDS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end == nullptr || *end != '\0' || value == 0) {
      throw Error(ErrorCode::InvalidArgument, "PRODUPD_BUDGET_WORLDS must be a positive integer");
    }
    budget.max_worlds_for_quantifier = value;
  }
  return budget;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, std::span<const Edge> edges,
                                                ErrorCode out_of_range) {
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [from, to] : edges) {
    if (from >= n || to >= n) throw Error(out_of_range, "edge endpoint out of range");
    succ[from].push_back(to);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return succ;
}

std::vector<Edge> edge_list(const std::vector<std::vector<std::size_t>>& succ) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    for (auto j : succ[i]) out.emplace_back(i, j);
  }
  return out;
}

}  // namespace

KripkeModel::KripkeModel(std::vector<WorldId> worlds, std::span<const Edge> edges,
                         std::map<PropName, WorldSet> valuation)
    : worlds_(std::move(worlds)), valuation_(std::move(valuation)) {
  index_.reserve(worlds_.size());
  for (std::size_t i = 0; i < worlds_.size(); ++i) {
    if (!index_.emplace(worlds_[i], i).second) {
      throw Error(ErrorCode::DuplicateWorld, "world '" + worlds_[i] + "' declared twice");
    }
  }
  successors_ = adjacency(worlds_.size(), edges, ErrorCode::UnknownWorldInRelation);
  for (const auto& [p, set] : valuation_) {
    if (set.universe() != worlds_.size()) {
      throw Error(ErrorCode::UnknownWorldInValuation, "valuation of '" + p + "' is over a different domain");
    }
  }
}

KripkeModel KripkeModel::from_names(std::vector<WorldId> worlds,
                                    const std::vector<std::pair<WorldId, WorldId>>& edges,
                                    const std::map<PropName, std::vector<WorldId>>& valuation) {
  std::unordered_map<WorldId, std::size_t> index;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    if (!index.emplace(worlds[i], i).second) {
      throw Error(ErrorCode::DuplicateWorld, "world '" + worlds[i] + "' declared twice");
    }
  }
  std::vector<Edge> indexed;
  indexed.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto f = index.find(from);
    auto t = index.find(to);
    if (f == index.end() || t == index.end()) {
      throw Error(ErrorCode::UnknownWorldInRelation,
                  "relation mentions unknown world '" + (f == index.end() ? from : to) + "'");
    }
    indexed.emplace_back(f->second, t->second);
  }
  std::map<PropName, WorldSet> val;
  for (const auto& [p, ws] : valuation) {
    WorldSet set(worlds.size());
    for (const auto& w : ws) {
      auto it = index.find(w);
      if (it == index.end()) {
        throw Error(ErrorCode::UnknownWorldInValuation, "valuation of '" + p + "' mentions unknown world '" + w + "'");
      }
      set.set(it->second);
    }
    val.emplace(p, std::move(set));
  }
  return KripkeModel(std::move(worlds), indexed, std::move(val));
}

std::optional<std::size_t> KripkeModel::index_of(const WorldId& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t KripkeModel::require(const WorldId& w) const {
  if (auto i = index_of(w)) return *i;
  throw Error(ErrorCode::WorldOutOfModel, "no world named '" + w + "'");
}

bool KripkeModel::has_edge(std::size_t from, std::size_t to) const {
  const auto& s = successors_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

std::vector<Edge> KripkeModel::edges() const { return edge_list(successors_); }

std::size_t KripkeModel::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : successors_) n += s.size();
  return n;
}

WorldSet KripkeModel::value(const PropName& p) const {
  auto it = valuation_.find(p);
  return it == valuation_.end() ? WorldSet(size()) : it->second;
}

bool operator==(const KripkeModel& a, const KripkeModel& b) {
  if (a.worlds_ != b.worlds_ || a.successors_ != b.successors_) return false;
  const auto nonempty_equal = [](const std::map<PropName, WorldSet>& x, const std::map<PropName, WorldSet>& y) {
    for (const auto& [p, set] : x) {
      if (set.empty()) continue;
      auto it = y.find(p);
      if (it == y.end() || !(it->second == set)) return false;
    }
    return true;
  };
  return nonempty_equal(a.valuation_, b.valuation_) && nonempty_equal(b.valuation_, a.valuation_);
}

EventModel::EventModel(std::vector<EventId> events, std::span<const Edge> edges, std::vector<Formula> preconditions)
    : events_(std::move(events)), pre_(std::move(preconditions)) {
  if (events_.empty()) throw Error(ErrorCode::EmptyEventSet, "an event model needs at least one event");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (events_[i] == events_[j]) throw Error(ErrorCode::DuplicateEvent, "event '" + events_[i] + "' declared twice");
    }
  }
  if (pre_.size() != events_.size()) {
    throw Error(ErrorCode::MissingPrecondition, "every event needs exactly one precondition");
  }
  successors_ = adjacency(events_.size(), edges, ErrorCode::UnknownEventInRelation);
  for (std::size_t i = 0; i < pre_.size(); ++i) {
    if (classify(pre_[i]) != LanguageTag::BaseMso) {
      throw Error(ErrorCode::PreconditionNotBaseMso, "precondition of '" + events_[i] + "' must be a static formula");
    }
    const auto names = all_props(pre_[i]);
    pre_props_.insert(names.begin(), names.end());
  }
}

EventModel EventModel::from_names(std::vector<EventId> events, const std::vector<std::pair<EventId, EventId>>& edges,
                                  const std::map<EventId, Formula>& preconditions) {
  const auto find = [&](const EventId& e) -> std::optional<std::size_t> {
    auto it = std::find(events.begin(), events.end(), e);
    if (it == events.end()) return std::nullopt;
    return static_cast<std::size_t>(it - events.begin());
  };
  std::vector<Edge> indexed;
  for (const auto& [from, to] : edges) {
    auto f = find(from);
    auto t = find(to);
    if (!f || !t) {
      throw Error(ErrorCode::UnknownEventInRelation, "relation mentions unknown event '" + (f ? to : from) + "'");
    }
    indexed.emplace_back(*f, *t);
  }
  for (const auto& [e, pre] : preconditions) {
    if (!find(e)) throw Error(ErrorCode::UnknownEvent, "precondition given for unknown event '" + e + "'");
  }
  std::vector<Formula> pres;
  for (const auto& e : events) {
    auto it = preconditions.find(e);
    if (it == preconditions.end()) {
      throw Error(ErrorCode::MissingPrecondition, "event '" + e + "' has no precondition");
    }
    pres.push_back(it->second);
  }
  return EventModel(std::move(events), indexed, std::move(pres));
}

std::optional<std::size_t> EventModel::index_of(const EventId& e) const {
  auto it = std::find(events_.begin(), events_.end(), e);
  if (it == events_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - events_.begin());
}

bool EventModel::has_edge(std::size_t from, std::size_t to) const {
  const auto& s = successors_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

std::vector<Edge> EventModel::edges() const { return edge_list(successors_); }

KripkeModel with_valuation(const KripkeModel& m, const PropName& p, const WorldSet& x) {
  if (x.universe() != m.size()) throw Error(ErrorCode::WorldOutOfModel, "override set is over a different domain");
  auto val = m.valuation();
  val[p] = x;
  const auto edges = m.edges();
  return KripkeModel(m.worlds(), edges, std::move(val));
}

namespace {

/// Restriction to `keep`, returning the old-to-new index map (npos if dropped).
std::pair<KripkeModel, std::vector<std::size_t>> restrict(const KripkeModel& m, const WorldSet& keep,
                                                          bool keep_edges = true) {
  constexpr auto npos = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(m.size(), npos);
  std::vector<WorldId> worlds;
  keep.for_each([&](std::size_t i) {
    remap[i] = worlds.size();
    worlds.push_back(m.world(i));
  });
  std::vector<Edge> edges;
  if (keep_edges) {
    for (const auto& [from, to] : m.edges()) {
      if (remap[from] != npos && remap[to] != npos) edges.emplace_back(remap[from], remap[to]);
    }
  }
  std::map<PropName, WorldSet> val;
  for (const auto& [p, set] : m.valuation()) {
    WorldSet restricted(worlds.size());
    set.for_each([&](std::size_t i) {
      if (remap[i] != npos) restricted.set(remap[i]);
    });
    val.emplace(p, std::move(restricted));
  }
  return {KripkeModel(std::move(worlds), edges, std::move(val)), std::move(remap)};
}

}  // namespace

KripkeModel relativise(const KripkeModel& m, const WorldSet& a) {
  if (a.universe() != m.size()) throw Error(ErrorCode::WorldOutOfModel, "relativisation set is over a different domain");
  return restrict(m, a).first;
}

TaggedModel relativise(const TaggedModel& m, const WorldSet& a) {
  if (a.universe() != m.model.size()) {
    throw Error(ErrorCode::WorldOutOfModel, "relativisation set is over a different domain");
  }
  TaggedModel out;
  out.model = restrict(m.model, a).first;
  a.for_each([&](std::size_t i) {
    if (m.tagged()) out.tags.push_back(m.tags[i]);
    if (!m.origin.empty()) out.origin.push_back(m.origin[i]);
  });
  return out;
}

TaggedModel product_from_extensions(const KripkeModel& m, const EventModel& a, std::span<const WorldSet> pre_ext) {
  constexpr auto npos = std::numeric_limits<std::size_t>::max();
  if (pre_ext.size() != a.size()) throw Error(ErrorCode::InvalidArgument, "one precondition extension per event");
  std::vector<std::size_t> pair_index(m.size() * a.size(), npos);
  TaggedModel out;
  std::vector<WorldId> names;
  for (std::size_t w = 0; w < m.size(); ++w) {
    for (std::size_t e = 0; e < a.size(); ++e) {
      if (!pre_ext[e].test(w)) continue;
      pair_index[w * a.size() + e] = names.size();
      names.push_back("(" + m.world(w) + "," + a.event(e) + ")");
      out.tags.push_back(e);
      out.origin.push_back(w);
    }
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::size_t w = out.origin[i];
    const std::size_t e = out.tags[i];
    for (auto w2 : m.successors(w)) {
      for (auto e2 : a.successors(e)) {
        const auto j = pair_index[w2 * a.size() + e2];
        if (j != npos) edges.emplace_back(i, j);
      }
    }
  }
  std::map<PropName, WorldSet> val;
  for (const auto& [p, set] : m.valuation()) {
    WorldSet lifted(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (set.test(out.origin[i])) lifted.set(i);
    }
    val.emplace(p, std::move(lifted));
  }
  out.model = KripkeModel(std::move(names), edges, std::move(val));
  return out;
}

std::optional<std::size_t> product_world(const TaggedModel& product, std::size_t w, std::size_t e) {
  for (std::size_t i = 0; i < product.origin.size(); ++i) {
    if (product.origin[i] == w && product.tags[i] == e) return i;
  }
  return std::nullopt;
}

TaggedModel product_update(const KripkeModel& m, const EventModel& a, const EvalBudget& budget) {
  std::vector<WorldSet> pre_ext;
  pre_ext.reserve(a.size());
  for (const auto& pre : a.preconditions()) pre_ext.push_back(extension(m, pre, budget));
  return product_from_extensions(m, a, pre_ext);
}

PointedModel generated_submodel_k(const KripkeModel& m, std::size_t w, std::size_t k) {
  if (w >= m.size()) throw Error(ErrorCode::WorldOutOfModel, "generating point outside the model");
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(m.size(), unreached);
  std::deque<std::size_t> queue{w};
  dist[w] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    if (dist[u] == k) continue;
    for (auto v : m.successors(u)) {
      if (dist[v] == unreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  WorldSet ball(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (dist[i] != unreached) ball.set(i);
  }
  auto [sub, remap] = restrict(m, ball, k > 0);
  return PointedModel{std::move(sub), remap[w]};
}

EventModel announcement_event_model(const Formula& announced) {
  const Edge loop{0, 0};
  return EventModel({"a0"}, std::span<const Edge>(&loop, 1), {announced});
}

KripkeModel clone_world(const KripkeModel& m, std::size_t w, const WorldId& name) {
  if (w >= m.size()) throw Error(ErrorCode::WorldOutOfModel, "cannot clone a world outside the model");
  const std::size_t copy = m.size();
  auto worlds = m.worlds();
  worlds.push_back(name);
  auto edges = m.edges();
  const auto original = edges;
  for (const auto& [from, to] : original) {
    if (from == w) edges.emplace_back(copy, to);
    if (to == w) edges.emplace_back(from, copy);
  }
  std::map<PropName, WorldSet> val;
  for (const auto& [p, set] : m.valuation()) {
    WorldSet grown(copy + 1);
    set.for_each([&](std::size_t i) { grown.set(i); });
    if (set.test(w)) grown.set(copy);
    val.emplace(p, std::move(grown));
  }
  return KripkeModel(std::move(worlds), edges, std::move(val));
}

}  // namespace produpd

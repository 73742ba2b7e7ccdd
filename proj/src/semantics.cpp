#include "produpd/semantics.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "produpd/error.hpp"

namespace produpd {

namespace {

/// What the quantifier loop needs to know about `Qp. body` beyond its body:
/// guard formulas chi from conjuncts U(p -> chi) that bound every useful
/// witness to subsets of [[chi]], and the polarity of p in the remainder.
struct QuantPlan {
  std::vector<Formula> guards;
  Polarity rest = Polarity::Mixed;
};

struct Shared {
  const EventModel* events = nullptr;
  EvalBudget budget;
  std::uint64_t enumerations = 0;
  std::unordered_map<const void*, QuantPlan> plans;
};

Polarity eval_polarity(const Formula& f, const PropName& p, const EventModel* events) {
  switch (f.kind()) {
    case Connective::Atom:
      return f.name() == p ? Polarity::Positive : Polarity::None;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Nominal:
      return Polarity::None;
    case Connective::Not:
      return flip(eval_polarity(f.operand(), p, events));
    case Connective::Implies:
      return join(flip(eval_polarity(f.left(), p, events)), eval_polarity(f.right(), p, events));
    case Connective::And:
    case Connective::Or:
      return join(eval_polarity(f.left(), p, events), eval_polarity(f.right(), p, events));
    case Connective::Announce:
      return eval_polarity(f.announced(), p, events) == Polarity::None ? eval_polarity(f.operand(), p, events)
                                                                        : Polarity::Mixed;
    case Connective::Action:
      if (events != nullptr && events->precondition_props().contains(p)) return Polarity::Mixed;
      return eval_polarity(f.operand(), p, events);
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu:
      return f.name() == p ? Polarity::None : eval_polarity(f.operand(), p, events);
    default:
      return eval_polarity(f.operand(), p, events);
  }
}

void flatten_and(const Formula& f, std::vector<Formula>& out) {
  if (f.is(Connective::And)) {
    flatten_and(f.left(), out);
    flatten_and(f.right(), out);
  } else {
    out.push_back(f);
  }
}

QuantPlan make_plan(const Formula& q, const EventModel* events) {
  const PropName& var = q.name();
  const bool universal = q.is(Connective::Forall);
  std::vector<const PropName*> inner;
  Formula body = q.operand();
  while (body.is(q.kind())) {
    inner.push_back(&body.name());
    body = body.operand();
  }
  for (const auto* name : inner) {
    if (*name == var) return QuantPlan{{}, Polarity::None};
  }

  std::vector<Formula> candidates;
  Formula consequent = Formula::top();
  if (!universal) {
    flatten_and(body, candidates);
  } else if (body.is(Connective::Implies)) {
    flatten_and(body.left(), candidates);
    consequent = body.right();
  } else {
    consequent = body;
  }

  QuantPlan plan;
  plan.rest = universal ? eval_polarity(consequent, var, events) : Polarity::None;
  for (const auto& c : candidates) {
    bool guard = c.is(Connective::Global) && c.operand().is(Connective::Implies) &&
                 c.operand().left().is(Connective::Atom) && c.operand().left().name() == var;
    if (guard) {
      const Formula& chi = c.operand().right();
      guard = !contains(chi, Connective::Action) && !contains(chi, Connective::Announce) && !occurs_free(chi, var);
      for (const auto* name : inner) guard = guard && !occurs_free(chi, *name);
      if (guard) {
        plan.guards.push_back(chi);
        continue;
      }
    }
    const Polarity pol = eval_polarity(c, var, events);
    plan.rest = join(plan.rest, universal ? flip(pol) : pol);
  }
  return plan;
}

class Evaluator {
 public:
  Evaluator(const TaggedModel& m, Shared& shared) : m_(m), s_(shared) {}

  void bind(const PropName& p, WorldSet x) { bindings_.emplace_back(&p, std::move(x)); }

  WorldSet eval(const Formula& f) {
    const std::size_t n = m_.model.size();
    switch (f.kind()) {
      case Connective::Top:
        return WorldSet::full(n);
      case Connective::Bottom:
        return WorldSet(n);
      case Connective::Atom:
        return lookup(f.name());
      case Connective::Nominal: {
        if (!m_.tagged()) {
          throw Error(ErrorCode::NominalOutsideProductContext,
                      "j" + std::to_string(f.nominal_index()) + " is evaluated outside any product");
        }
        WorldSet out(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (m_.tags[i] == f.nominal_index()) out.set(i);
        }
        return out;
      }
      case Connective::Not:
        return eval(f.operand()).complement();
      case Connective::And: {
        WorldSet l = eval(f.left());
        if (l.empty()) return l;
        return l & eval(f.right());
      }
      case Connective::Or: {
        WorldSet l = eval(f.left());
        if (l.is_full()) return l;
        return l | eval(f.right());
      }
      case Connective::Implies: {
        WorldSet l = eval(f.left());
        if (l.empty()) return WorldSet::full(n);
        return l.complement() | eval(f.right());
      }
      case Connective::Box:
      case Connective::Diamond: {
        const WorldSet s = eval(f.operand());
        const bool universal = f.is(Connective::Box);
        WorldSet out(n);
        for (std::size_t w = 0; w < n; ++w) {
          bool ok = universal;
          for (auto v : m_.model.successors(w)) {
            if (s.test(v) != universal) {
              ok = !universal;
              break;
            }
          }
          if (ok) out.set(w);
        }
        return out;
      }
      case Connective::Global:
        return eval(f.operand()).is_full() ? WorldSet::full(n) : WorldSet(n);
      case Connective::ExistsGlobal:
        return eval(f.operand()).empty() ? WorldSet(n) : WorldSet::full(n);
      case Connective::Exists:
      case Connective::Forall:
        return quantifier(f);
      case Connective::Nu:
        return fixpoint(f);
      case Connective::Action:
        return action(f);
      case Connective::Announce:
        return announcement(f);
    }
    return WorldSet(n);
  }

 private:
  WorldSet lookup(const PropName& p) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
      if (*it->first == p) return it->second;
    }
    return m_.model.value(p);
  }

  void count_enumeration() {
    if (++s_.enumerations > s_.budget.max_total_subset_enumerations) {
      throw Error(ErrorCode::BudgetExceeded, "subset enumeration budget of " +
                                                 std::to_string(s_.budget.max_total_subset_enumerations) +
                                                 " exhausted");
    }
  }

  const QuantPlan& plan_for(const Formula& q) {
    auto it = s_.plans.find(q.id());
    if (it == s_.plans.end()) it = s_.plans.emplace(q.id(), make_plan(q, s_.events)).first;
    return it->second;
  }

  WorldSet quantifier(const Formula& q) {
    const std::size_t n = m_.model.size();
    if (n > s_.budget.max_worlds_for_quantifier) {
      throw Error(ErrorCode::BudgetExceeded, "quantifier over " + std::to_string(n) + " worlds exceeds the limit of " +
                                                 std::to_string(s_.budget.max_worlds_for_quantifier));
    }
    const bool universal = q.is(Connective::Forall);
    WorldSet mask = WorldSet::full(n);
    Polarity pol = Polarity::Mixed;
    if (s_.budget.prune_quantifiers) {
      const QuantPlan& plan = plan_for(q);
      for (const auto& chi : plan.guards) mask &= eval(chi);
      pol = plan.rest;
    }

    const std::size_t slot = bindings_.size();
    bindings_.emplace_back(&q.name(), WorldSet(n));
    WorldSet acc = universal ? WorldSet::full(n) : WorldSet(n);
    const auto try_set = [&](const WorldSet& x) {
      count_enumeration();
      bindings_[slot].second = x;
      const WorldSet r = eval(q.operand());
      if (universal) {
        acc &= r;
        return acc.empty();
      }
      acc |= r;
      return acc.is_full();
    };

    switch (pol) {
      case Polarity::None:
        try_set(WorldSet(n));
        break;
      case Polarity::Positive:
        try_set(universal ? WorldSet(n) : mask);
        break;
      case Polarity::Negative:
        try_set(universal ? mask : WorldSet(n));
        break;
      case Polarity::Mixed: {
        const auto free_worlds = mask.indices();
        const std::uint64_t limit = std::uint64_t{1} << free_worlds.size();
        WorldSet x(n);
        for (std::uint64_t bits = 0; bits < limit; ++bits) {
          x.clear();
          for (std::size_t i = 0; i < free_worlds.size(); ++i) {
            if ((bits >> i) & 1u) x.set(free_worlds[i]);
          }
          if (try_set(x)) break;
        }
        break;
      }
    }
    bindings_.pop_back();
    return acc;
  }

  WorldSet fixpoint(const Formula& f) {
    const std::size_t slot = bindings_.size();
    WorldSet x = WorldSet::full(m_.model.size());
    bindings_.emplace_back(&f.name(), x);
    for (;;) {
      bindings_[slot].second = x;
      WorldSet next = eval(f.operand()) & x;
      if (next == x) break;
      x = std::move(next);
    }
    bindings_.pop_back();
    return x;
  }

  KripkeModel materialise() const {
    if (bindings_.empty()) return m_.model;
    auto val = m_.model.valuation();
    for (const auto& [name, set] : bindings_) val[*name] = set;
    const auto edges = m_.model.edges();
    return KripkeModel(m_.model.worlds(), edges, std::move(val));
  }

  WorldSet action(const Formula& f) {
    if (s_.events == nullptr) throw Error(ErrorCode::UnknownEvent, "no event model for <" + f.name() + ">");
    const auto e = s_.events->index_of(f.name());
    if (!e) throw Error(ErrorCode::UnknownEvent, "event '" + f.name() + "' is not in the event model");

    const KripkeModel base = materialise();
    TaggedModel plain{base, {}, {}};
    std::vector<WorldSet> pre_ext;
    pre_ext.reserve(s_.events->size());
    for (const auto& pre : s_.events->preconditions()) {
      Evaluator sub(plain, s_);
      pre_ext.push_back(sub.eval(pre));
    }
    const TaggedModel product = product_from_extensions(base, *s_.events, pre_ext);
    Evaluator sub(product, s_);
    const WorldSet inner = sub.eval(f.operand());

    WorldSet out(base.size());
    for (std::size_t i = 0; i < product.model.size(); ++i) {
      if (product.tags[i] == *e && inner.test(i)) out.set(product.origin[i]);
    }
    return out;
  }

  WorldSet announcement(const Formula& f) {
    const WorldSet kept = eval(f.announced());
    if (kept.empty()) return kept;
    const TaggedModel restricted = relativise(TaggedModel{materialise(), m_.tags, m_.origin}, kept);
    Evaluator sub(restricted, s_);
    const WorldSet inner = sub.eval(f.operand());
    WorldSet out(m_.model.size());
    std::size_t k = 0;
    kept.for_each([&](std::size_t w) {
      if (inner.test(k++)) out.set(w);
    });
    return out;
  }

  const TaggedModel& m_;
  Shared& s_;
  std::vector<std::pair<const PropName*, WorldSet>> bindings_;
};

void nominal_scope(const Formula& f, bool under_action) {
  switch (f.kind()) {
    case Connective::Nominal:
      if (!under_action) {
        throw Error(ErrorCode::NominalOutsideProductContext,
                    "j" + std::to_string(f.nominal_index()) + " occurs outside every action modality");
      }
      return;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
      return;
    case Connective::Action:
      nominal_scope(f.operand(), true);
      return;
    default:
      if (f.is_binary()) {
        nominal_scope(f.left(), under_action);
        nominal_scope(f.right(), under_action);
      } else {
        nominal_scope(f.operand(), under_action);
      }
  }
}

void check_events(const Formula& f, const EventModel* events) {
  switch (f.kind()) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
    case Connective::Nominal:
      return;
    case Connective::Action:
      if (events == nullptr || !events->index_of(f.name())) {
        throw Error(ErrorCode::UnknownEvent, "event '" + f.name() + "' is not in the event model");
      }
      check_events(f.operand(), events);
      return;
    default:
      if (f.is_binary()) {
        check_events(f.left(), events);
        check_events(f.right(), events);
      } else {
        check_events(f.operand(), events);
      }
  }
}

void validate(const TaggedModel& m, const Formula& phi, const EventModel* events) {
  check_positivity(phi);
  check_events(phi, events);
  if (!m.tagged()) nominal_scope(phi, false);
}

}  // namespace

WorldSet extension(const TaggedModel& m, const Formula& phi, const EvalBudget& budget, const EventModel* events) {
  validate(m, phi, events);
  Shared shared{events, budget, 0, {}};
  Evaluator ev(m, shared);
  return ev.eval(phi);
}

WorldSet extension(const KripkeModel& m, const Formula& phi, const EvalBudget& budget, const EventModel* events) {
  return extension(TaggedModel{m, {}, {}}, phi, budget, events);
}

bool holds(const TaggedModel& m, std::size_t world, const Formula& phi, const EvalBudget& budget,
           const EventModel* events) {
  if (world >= m.model.size()) throw Error(ErrorCode::WorldOutOfModel, "world index out of range");
  return extension(m, phi, budget, events).test(world);
}

bool holds(const KripkeModel& m, std::size_t world, const Formula& phi, const EvalBudget& budget,
           const EventModel* events) {
  return holds(TaggedModel{m, {}, {}}, world, phi, budget, events);
}

WorldSet apply_body(const KripkeModel& m, const PropName& p, const Formula& body, const WorldSet& x,
                    const EvalBudget& budget, const EventModel* events) {
  const TaggedModel tm{m, {}, {}};
  validate(tm, body, events);
  Shared shared{events, budget, 0, {}};
  Evaluator ev(tm, shared);
  ev.bind(p, x);
  return ev.eval(body);
}

WorldSet gfp_oracle(const KripkeModel& m, const PropName& p, const Formula& body, const EvalBudget& budget,
                    const EventModel* events) {
  check_positivity(Formula::nu(p, body));
  const std::size_t n = m.size();
  if (n > budget.max_worlds_for_quantifier) {
    throw Error(ErrorCode::BudgetExceeded, "fixpoint oracle over " + std::to_string(n) + " worlds");
  }
  WorldSet result(n);
  WorldSet x(n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    x.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if ((bits >> i) & 1u) x.set(i);
    }
    if (x.is_subset_of(apply_body(m, p, body, x, budget, events))) result |= x;
  }
  return result;
}

}  // namespace produpd

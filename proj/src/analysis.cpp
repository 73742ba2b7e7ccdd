#include "produpd/analysis.hpp"

#include <algorithm>

#include "produpd/error.hpp"
#include "produpd/parser.hpp"
#include "produpd/semantics.hpp"

namespace produpd {

namespace {

std::set<PropName> mentioned_props(const KripkeModel& m1, const KripkeModel& m2) {
  std::set<PropName> out;
  for (const auto& [p, set] : m1.valuation()) {
    if (!set.empty()) out.insert(p);
  }
  for (const auto& [p, set] : m2.valuation()) {
    if (!set.empty()) out.insert(p);
  }
  return out;
}

bool atoms_agree(const KripkeModel& m1, std::size_t s, const KripkeModel& m2, std::size_t t,
                 const std::set<PropName>& props) {
  return std::all_of(props.begin(), props.end(),
                     [&](const PropName& p) { return m1.value(p).test(s) == m2.value(p).test(t); });
}

// Every successor of s has a Z-partner among the successors of t, and vice versa.
template <class Related>
bool zigzag(const KripkeModel& m1, std::size_t s, const KripkeModel& m2, std::size_t t, Related&& related) {
  for (std::size_t s2 : m1.successors(s)) {
    const auto& succ = m2.successors(t);
    if (std::none_of(succ.begin(), succ.end(), [&](std::size_t t2) { return related(s2, t2); })) return false;
  }
  for (std::size_t t2 : m2.successors(t)) {
    const auto& succ = m1.successors(s);
    if (std::none_of(succ.begin(), succ.end(), [&](std::size_t s2) { return related(s2, t2); })) return false;
  }
  return true;
}

}  // namespace

Bisimulation greatest_bisimulation(const KripkeModel& m1, const KripkeModel& m2) {
  const auto props = mentioned_props(m1, m2);
  std::vector<WorldSet> rel(m1.size(), WorldSet(m2.size()));
  for (std::size_t s = 0; s < m1.size(); ++s) {
    for (std::size_t t = 0; t < m2.size(); ++t) {
      if (atoms_agree(m1, s, m2, t, props)) rel[s].set(t);
    }
  }
  auto related = [&](std::size_t s, std::size_t t) { return rel[s].test(t); };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < m1.size(); ++s) {
      for (std::size_t t : rel[s].indices()) {
        if (!zigzag(m1, s, m2, t, related)) {
          rel[s].reset(t);
          changed = true;
        }
      }
    }
  }
  Bisimulation z;
  for (std::size_t s = 0; s < m1.size(); ++s) {
    rel[s].for_each([&](std::size_t t) { z.pairs.emplace(s, t); });
  }
  return z;
}

bool is_bisimulation(const KripkeModel& m1, const KripkeModel& m2, const Bisimulation& z) {
  const auto props = mentioned_props(m1, m2);
  auto related = [&](std::size_t s, std::size_t t) { return z.contains(s, t); };
  return std::all_of(z.pairs.begin(), z.pairs.end(), [&](const auto& st) {
    const auto [s, t] = st;
    return s < m1.size() && t < m2.size() && atoms_agree(m1, s, m2, t, props) && zigzag(m1, s, m2, t, related);
  });
}

LiftedBisimulation lift_bisimulation(const Bisimulation& z, const EventModel& a, const KripkeModel& m1,
                                     const KripkeModel& m2, const EvalBudget& budget) {
  if (!is_bisimulation(m1, m2, z)) {
    throw Error(ErrorCode::NotABisimulation, "the relation to lift fails the atom, forth or back clause");
  }
  LiftedBisimulation out{product_update(m1, a, budget), product_update(m2, a, budget), {}};
  for (const auto& [s, t] : z.pairs) {
    for (std::size_t e = 0; e < a.size(); ++e) {
      const auto left = product_world(out.left, s, e);
      const auto right = product_world(out.right, t, e);
      if (left && right) out.relation.pairs.emplace(*left, *right);
    }
  }
  return out;
}

DegreeCheckResult check_degree(const Formula& phi, std::size_t k, const std::vector<PointedModel>& testset,
                               const EvalBudget& budget, const EventModel* events) {
  DegreeCheckResult result{phi, k, DegreeVerdict::ConsistentOnTestSet, std::nullopt, std::nullopt, false, false};
  for (std::size_t i = 0; i < testset.size(); ++i) {
    const auto& [model, point] = testset[i];
    const PointedModel local = generated_submodel_k(model, point, k);
    const bool full = holds(model, point, phi, budget, events);
    const bool sub = holds(local.model, local.point, phi, budget, events);
    if (full != sub) {
      result.verdict = DegreeVerdict::Counterexample;
      result.witness_index = i;
      result.counterexample = testset[i];
      result.value_on_full = full;
      result.value_on_submodel = sub;
      return result;
    }
  }
  return result;
}

std::size_t k_star(const std::vector<std::size_t>& deg_pres, std::size_t deg_phi) {
  if (deg_pres.empty()) throw Error(ErrorCode::InvalidArgument, "k_star needs at least one precondition degree");
  return *std::max_element(deg_pres.begin(), deg_pres.end()) + deg_phi;
}

bool is_named_submodel(const KripkeModel& sub, const KripkeModel& super) {
  std::vector<std::size_t> into(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto j = super.index_of(sub.world(i));
    if (!j) return false;
    into[i] = *j;
  }
  for (const auto& [from, to] : sub.edges()) {
    if (!super.has_edge(into[from], into[to])) return false;
  }
  for (const auto& [p, set] : sub.valuation()) {
    const WorldSet outer = super.value(p);
    bool ok = true;
    set.for_each([&](std::size_t i) { ok = ok && outer.test(into[i]); });
    if (!ok) return false;
  }
  return true;
}

nlohmann::json to_json(const Bisimulation& z, const KripkeModel& m1, const KripkeModel& m2) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [s, t] : z.pairs) pairs.push_back({m1.world(s), m2.world(t)});
  return pairs;
}

nlohmann::json to_json(const DegreeCheckResult& result) {
  nlohmann::json j = {
      {"formula", print_formula(result.formula)},
      {"k", result.k},
      {"verdict", result.verdict == DegreeVerdict::ConsistentOnTestSet ? "ConsistentOnTestSet" : "Counterexample"},
  };
  if (result.counterexample) {
    j["counterexample"] = {
        {"index", *result.witness_index},
        {"model", to_json(result.counterexample->model)},
        {"point", result.counterexample->model.world(result.counterexample->point)},
        {"full", result.value_on_full},
        {"submodel", result.value_on_submodel},
    };
  }
  return j;
}

}  // namespace produpd

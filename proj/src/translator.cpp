#include "produpd/translator.hpp"

#include "produpd/error.hpp"
#include "produpd/parser.hpp"

namespace produpd {

namespace {

bool has_dynamic_nodes(const Formula& f) {
  return contains(f, Connective::Action) || contains(f, Connective::Announce) || contains(f, Connective::Nu);
}

// Rewrites <alpha> psi into a static formula. Each recursive call on a
// subformula passes through `descend`, which reports the measure pair to the
// observer before recursing.
class EventTranslator {
 public:
  EventTranslator(const EventModel& a, const MeasureObserver& observer) : a_(a), observer_(observer) {}

  Formula run(std::size_t alpha, const Formula& psi) { return translate(alpha, psi); }

 private:
  Formula descend(std::size_t alpha, const Formula& child, const Formula& parent) {
    if (observer_) observer_(measure_of(parent), measure_of(child));
    return translate(alpha, child);
  }

  Formula translate(std::size_t alpha, const Formula& psi) {
    const Formula& pre = a_.pre(alpha);
    switch (psi.kind()) {
      case Connective::Top:
        return pre;
      case Connective::Bottom:
        return Formula::bottom();
      case Connective::Atom:
        return Formula::conj(pre, psi);
      case Connective::Nominal:
        return psi.nominal_index() == alpha ? pre : Formula::bottom();
      case Connective::Not:
        return Formula::conj(pre, Formula::negate(descend(alpha, psi.operand(), psi)));
      case Connective::And:
        return Formula::conj(descend(alpha, psi.left(), psi), descend(alpha, psi.right(), psi));
      case Connective::Or:
        return Formula::disj(descend(alpha, psi.left(), psi), descend(alpha, psi.right(), psi));
      case Connective::Implies:
        return Formula::conj(pre,
                             Formula::implies(descend(alpha, psi.left(), psi), descend(alpha, psi.right(), psi)));
      case Connective::Box: {
        std::vector<Formula> parts;
        for (std::size_t beta : a_.successors(alpha)) {
          parts.push_back(Formula::box(Formula::implies(a_.pre(beta), descend(beta, psi.operand(), psi))));
        }
        return Formula::conj(pre, Formula::conj_all(parts));
      }
      case Connective::Diamond: {
        std::vector<Formula> parts;
        for (std::size_t beta : a_.successors(alpha)) {
          parts.push_back(Formula::diamond(descend(beta, psi.operand(), psi)));
        }
        return Formula::conj(pre, Formula::disj_all(parts));
      }
      case Connective::Global: {
        std::vector<Formula> parts;
        for (std::size_t beta = 0; beta < a_.size(); ++beta) {
          parts.push_back(Formula::global(Formula::implies(a_.pre(beta), descend(beta, psi.operand(), psi))));
        }
        return Formula::conj(pre, Formula::conj_all(parts));
      }
      case Connective::ExistsGlobal: {
        std::vector<Formula> parts;
        for (std::size_t beta = 0; beta < a_.size(); ++beta) {
          parts.push_back(Formula::exists_global(descend(beta, psi.operand(), psi)));
        }
        return Formula::conj(pre, Formula::disj_all(parts));
      }
      case Connective::Exists:
      case Connective::Forall:
        return quantifier(alpha, psi);
      case Connective::Action:
      case Connective::Announce:
      case Connective::Nu:
        break;
    }
    throw Error(ErrorCode::InputNotSentenceFragment, "unexpected dynamic node in " + print_formula(psi));
  }

  // The witness set for p in the product splits into one slice per event.
  // Slice i is named by a fresh proposition confined to Pre_i, and p becomes
  // the disjunction of (slice_i & j_i).
  Formula quantifier(std::size_t alpha, const Formula& psi) {
    std::set<PropName> avoid = all_props(psi);
    avoid.insert(a_.precondition_props().begin(), a_.precondition_props().end());
    const std::vector<PropName> slices = fresh_props(a_.size(), avoid);

    std::vector<Formula> pieces;
    std::vector<Formula> guards;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const Formula slice = Formula::atom(slices[i]);
      pieces.push_back(Formula::conj(slice, Formula::nominal(i)));
      guards.push_back(Formula::global(Formula::implies(slice, a_.pre(i))));
    }
    const Formula body = substitute(psi.operand(), psi.name(), Formula::disj_all(pieces));
    Formula inner = descend(alpha, body, psi);

    Formula out;
    if (psi.is(Connective::Exists)) {
      guards.push_back(std::move(inner));
      out = Formula::conj_all(guards);
    } else {
      out = Formula::implies(Formula::conj_all(guards), std::move(inner));
    }
    for (auto it = slices.rbegin(); it != slices.rend(); ++it) {
      out = psi.is(Connective::Exists) ? Formula::exists(*it, std::move(out)) : Formula::forall(*it, std::move(out));
    }
    if (psi.is(Connective::Forall)) out = Formula::conj(a_.pre(alpha), std::move(out));
    return out;
  }

  const EventModel& a_;
  const MeasureObserver& observer_;
};

Formula announce_rec(const Formula& a, const Formula& psi) {
  switch (psi.kind()) {
    case Connective::Top:
      return a;
    case Connective::Bottom:
      return Formula::bottom();
    case Connective::Atom:
    case Connective::Nominal:
      return Formula::conj(a, psi);
    case Connective::Not:
      return Formula::conj(a, Formula::negate(announce_rec(a, psi.operand())));
    case Connective::And:
      return Formula::conj(announce_rec(a, psi.left()), announce_rec(a, psi.right()));
    case Connective::Or:
      return Formula::disj(announce_rec(a, psi.left()), announce_rec(a, psi.right()));
    case Connective::Implies:
      return Formula::conj(a, Formula::implies(announce_rec(a, psi.left()), announce_rec(a, psi.right())));
    case Connective::Box:
      return Formula::conj(a, Formula::box(Formula::implies(a, announce_rec(a, psi.operand()))));
    case Connective::Diamond:
      return Formula::conj(a, Formula::diamond(announce_rec(a, psi.operand())));
    case Connective::Global:
      return Formula::conj(a, Formula::global(Formula::implies(a, announce_rec(a, psi.operand()))));
    case Connective::ExistsGlobal:
      return Formula::conj(a, Formula::exists_global(announce_rec(a, psi.operand())));
    case Connective::Exists:
    case Connective::Forall: {
      PropName var = psi.name();
      Formula body = psi.operand();
      if (occurs_free(a, var)) {
        std::set<PropName> avoid = all_props(a);
        const std::set<PropName> inner = all_props(body);
        avoid.insert(inner.begin(), inner.end());
        avoid.insert(var);
        const PropName renamed = fresh_props(1, avoid).front();
        body = substitute(body, var, Formula::atom(renamed));
        var = renamed;
      }
      const Formula guard = Formula::global(Formula::implies(Formula::atom(var), a));
      if (psi.is(Connective::Exists)) {
        return Formula::exists(var, Formula::conj(guard, announce_rec(a, body)));
      }
      return Formula::conj(a, Formula::forall(var, Formula::implies(guard, announce_rec(a, body))));
    }
    case Connective::Action:
    case Connective::Announce:
    case Connective::Nu:
      break;
  }
  throw Error(ErrorCode::InputNotSentenceFragment, "unexpected dynamic node in " + print_formula(psi));
}

class Eliminator {
 public:
  Eliminator(const EventModel* a, const TranslateOptions& options) : a_(a), options_(options) {}

  Formula run(const Formula& f) {
    switch (f.kind()) {
      case Connective::Top:
      case Connective::Bottom:
      case Connective::Atom:
      case Connective::Nominal:
        return f;
      case Connective::Nu: {
        Formula out = encode_nu(f.name(), run(f.operand()));
        record("nu", f);
        return out;
      }
      case Connective::Announce: {
        Formula out = translate_announcement(run(f.announced()), run(f.operand()));
        record("announcement", f);
        return out;
      }
      case Connective::Action: {
        if (a_ == nullptr) throw Error(ErrorCode::UnknownEvent, "no event model for <" + f.name() + ">");
        Formula out = translate_event(*a_, f.name(), run(f.operand()), options_);
        record("action", f);
        return out;
      }
      default:
        break;
    }
    if (f.is_binary()) return f.with_children(run(f.left()), run(f.right()));
    return f.with_child(run(f.operand()));
  }

  std::vector<TranslationStep> steps;

 private:
  void record(const char* rule, const Formula& redex) { steps.push_back({rule, print_formula(redex)}); }

  const EventModel* a_;
  const TranslateOptions& options_;
};

TranslationReport eliminate(const EventModel* a, const Formula& phi, const TranslateOptions& options) {
  if (classify(phi) == LanguageTag::SentenceOnly) {
    throw Error(ErrorCode::InputNotSentenceFragment, "a nominal occurs outside every action modality");
  }
  Eliminator elim(a, options);
  TranslationReport report;
  report.input = phi;
  report.output = elim.run(phi);
  if (options.simplify) {
    report.output = simplify(report.output);
    report.simplified = true;
  }
  report.steps = std::move(elim.steps);
  report.input_size = phi.size();
  report.output_size = report.output.size();
  report.input_eps = quantifier_nodes(phi);
  report.output_eps = quantifier_count(report.output);
  return report;
}

}  // namespace

Measure measure_of(const Formula& phi) { return Measure{quantifier_count(phi), phi.size()}; }

Formula translate_event(const EventModel& a, std::size_t alpha, const Formula& psi, const TranslateOptions& options) {
  if (alpha >= a.size()) throw Error(ErrorCode::UnknownEvent, "event index " + std::to_string(alpha));
  if (has_dynamic_nodes(psi)) {
    throw Error(ErrorCode::InputNotSentenceFragment,
                "the argument of an event translation may not contain actions, announcements or nu");
  }
  EventTranslator translator(a, options.observer);
  return translator.run(alpha, psi);
}

Formula translate_event(const EventModel& a, const EventName& alpha, const Formula& psi,
                        const TranslateOptions& options) {
  const auto index = a.index_of(alpha);
  if (!index) throw Error(ErrorCode::UnknownEvent, "unknown event '" + alpha + "'");
  return translate_event(a, *index, psi, options);
}

Formula translate_announcement(const Formula& announced, const Formula& psi) {
  if (has_dynamic_nodes(announced) || has_dynamic_nodes(psi)) {
    throw Error(ErrorCode::InputNotSentenceFragment,
                "announcement translation expects static announced formula and body");
  }
  return announce_rec(announced, psi);
}

TranslationReport eliminate_all(const EventModel& a, const Formula& phi, const TranslateOptions& options) {
  return eliminate(&a, phi, options);
}

TranslationReport eliminate_all(const Formula& phi, const TranslateOptions& options) {
  return eliminate(nullptr, phi, options);
}

Formula encode_nu(const PropName& var, const Formula& body) {
  const Formula p = Formula::atom(var);
  return Formula::exists(var, Formula::conj(p, Formula::global(Formula::implies(p, body))));
}

SingletonSchema singleton_point_schema(const PropName& var, const Formula& body, SchemaVariant variant) {
  std::set<PropName> avoid = all_props(body);
  avoid.insert(var);
  const Formula p = Formula::atom(var);
  const Formula q = Formula::atom(fresh_props(1, avoid).front());

  Formula antecedent = Formula::global(Formula::implies(q, p));
  const bool guarded = variant == SchemaVariant::Corrected;
  if (guarded) antecedent = Formula::conj(Formula::exists_global(q), std::move(antecedent));
  const Formula minimal =
      Formula::forall(q.name(), Formula::implies(std::move(antecedent), Formula::global(Formula::implies(p, q))));
  const Formula singleton = Formula::conj(Formula::exists_global(p), minimal);
  return SingletonSchema{Formula::exists(var, Formula::conj(singleton, body)), guarded};
}

nlohmann::json to_json(const TranslationReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.steps) steps.push_back({{"rule", s.rule}, {"at", s.at}});
  return {
      {"input", print_formula(report.input)},
      {"output", print_formula(report.output)},
      {"input_size", report.input_size},
      {"output_size", report.output_size},
      {"input_eps", report.input_eps},
      {"output_eps", report.output_eps},
      {"steps", std::move(steps)},
      {"simplified", report.simplified},
      {"target_language", to_string(LanguageTag::BaseMso)},
  };
}

}  // namespace produpd

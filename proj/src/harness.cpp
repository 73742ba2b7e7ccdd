#include "produpd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <utility>

#include "produpd/analysis.hpp"
#include "produpd/error.hpp"
#include "produpd/parser.hpp"
#include "produpd/semantics.hpp"
#include "produpd/translator.hpp"

namespace produpd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

const char* to_string(Suite suite) {
  switch (suite) {
    case Suite::Translation: return "translation";
    case Suite::Announcement: return "announcement";
    case Suite::Nominals: return "nominals";
    case Suite::Fixpoint: return "fixpoint";
    case Suite::BisimLift: return "bisim_lift";
    case Suite::Degree: return "degree";
  }
  return "?";
}

std::vector<Suite> all_suites() {
  return {Suite::Translation, Suite::Announcement, Suite::Nominals, Suite::Fixpoint, Suite::BisimLift, Suite::Degree};
}

Suite suite_from_string(std::string_view name) {
  for (Suite s : all_suites()) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + std::string(name) + "'");
}

void FuzzConfig::validate() const {
  if (cases == 0) throw Error(ErrorCode::InvalidArgument, "cases must be at least 1");
  if (max_worlds == 0) throw Error(ErrorCode::InvalidArgument, "max_worlds must be at least 1");
  if (max_events == 0) throw Error(ErrorCode::InvalidArgument, "max_events must be at least 1");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "edge_probability must lie in [0, 1]");
  }
  if (degree_max_worlds == 0) throw Error(ErrorCode::InvalidArgument, "degree_max_worlds must be at least 1");
}

Rng::Rng(std::uint64_t seed, std::uint64_t case_index, std::string_view label) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  state ^= case_index * 0xd1b54a32d192ed03ULL;
  key ^= splitmix64(state);
  state ^= fnv1a(label);
  key ^= splitmix64(state);
  engine_.seed(key);
}

std::size_t Rng::below(std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return static_cast<std::size_t>(x % bound);
  }
}

bool Rng::chance(double p) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return u < p;
}

std::vector<PropName> proposition_names(std::size_t count) {
  static const char* const letters[] = {"p", "q", "r", "s", "t"};
  std::vector<PropName> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(i < 5 ? letters[i] : "p" + std::to_string(i));
  return out;
}

KripkeModel random_model(const FuzzConfig& cfg, Rng& rng, std::size_t max_worlds) {
  const std::size_t n = rng.between(1, std::max<std::size_t>(max_worlds, 1));
  std::vector<WorldId> worlds;
  for (std::size_t i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.chance(cfg.edge_probability)) edges.emplace_back(i, j);
    }
  }
  std::map<PropName, WorldSet> val;
  for (const auto& p : proposition_names(cfg.max_props)) {
    WorldSet set(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.chance(0.5)) set.set(i);
    }
    val.emplace(p, std::move(set));
  }
  return KripkeModel(std::move(worlds), edges, std::move(val));
}

KripkeModel random_model(const FuzzConfig& cfg, std::uint64_t case_index) {
  Rng rng(cfg.seed, case_index, "model");
  return random_model(cfg, rng, cfg.max_worlds);
}

EventModel random_event_model(const FuzzConfig& cfg, Rng& rng, bool local) {
  const std::size_t n = rng.between(1, cfg.max_events);
  const std::size_t trivial = rng.below(n);
  const auto props = proposition_names(cfg.max_props);
  FormulaShape shape;
  shape.max_size = 4;
  shape.global = !local;

  std::vector<EventId> events;
  std::vector<Formula> pres;
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back("a" + std::to_string(i));
    pres.push_back(i == trivial ? Formula::top() : random_shaped_formula(rng, props, shape));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.chance(cfg.edge_probability)) edges.emplace_back(i, j);
    }
  }
  return EventModel(std::move(events), edges, std::move(pres));
}

EventModel random_event_model(const FuzzConfig& cfg, std::uint64_t case_index) {
  Rng rng(cfg.seed, case_index, "events");
  return random_event_model(cfg, rng, false);
}

namespace {

class FormulaGen {
 public:
  FormulaGen(Rng& rng, const std::vector<PropName>& props, const FormulaShape& shape, const EventModel* events)
      : rng_(rng), props_(props), shape_(shape), events_(events), quantifiers_left_(shape.max_quantifiers) {}

  Formula generate(std::size_t size) { return gen(std::max<std::size_t>(size, 1), false); }

  // Binds var as a nu variable at positive polarity and prefers it at leaves.
  void bind_nu(const PropName& var) {
    scopes_.push_back({var, true, false, false});
    favourite_ = var;
  }

 private:
  struct Scope {
    PropName name;
    bool nu;
    bool negated;
    bool blocked = false;
  };

  enum class Choice { Not, Box, Diamond, Global, ExistsGlobal, Action, Exists, Forall, Nu, And, Or, Implies, Announce };

  bool usable(const PropName& name, bool negated) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->name == name) return !it->blocked && (!it->nu || it->negated == negated);
    }
    return true;
  }

  Formula leaf(bool negated) {
    if (favourite_ && usable(*favourite_, negated) && rng_.chance(0.4)) return Formula::atom(*favourite_);
    std::vector<Formula> options;
    for (const auto& p : props_) {
      if (usable(p, negated)) options.push_back(Formula::atom(p));
    }
    for (const auto& s : scopes_) {
      if (std::find(props_.begin(), props_.end(), s.name) == props_.end() && usable(s.name, negated)) {
        options.push_back(Formula::atom(s.name));
      }
    }
    for (std::size_t i = 0; i < shape_.nominals; ++i) options.push_back(Formula::nominal(i));
    if (rng_.chance(0.1) || options.empty()) return rng_.chance(0.5) ? Formula::top() : Formula::bottom();
    return options[rng_.below(options.size())];
  }

  Formula bound(Connective kind, std::size_t size, bool negated) {
    const PropName var = props_.empty() ? PropName("p") : props_[rng_.below(props_.size())];
    scopes_.push_back({var, kind == Connective::Nu, negated, false});
    const std::optional<PropName> outer = std::exchange(favourite_, var);
    Formula body = gen(size - 1, negated);
    favourite_ = outer;
    scopes_.pop_back();
    if (kind == Connective::Exists) return Formula::exists(var, std::move(body));
    if (kind == Connective::Forall) return Formula::forall(var, std::move(body));
    return Formula::nu(var, std::move(body));
  }

  Formula gen(std::size_t size, bool negated) {
    if (size == 1) return leaf(negated);
    std::vector<std::pair<Choice, std::size_t>> choices = {{Choice::Not, 2}, {Choice::Box, 3}, {Choice::Diamond, 3}};
    if (!shape_.mu_only) {
      if (shape_.global) {
        choices.emplace_back(Choice::Global, 1);
        choices.emplace_back(Choice::ExistsGlobal, 1);
      }
      if (shape_.actions && events_ != nullptr) choices.emplace_back(Choice::Action, 3);
      if (quantifiers_left_ > 0) {
        choices.emplace_back(Choice::Exists, 2);
        choices.emplace_back(Choice::Forall, 1);
      }
    }
    if (shape_.nu || shape_.mu_only) choices.emplace_back(Choice::Nu, 2);
    if (size >= 3) {
      choices.emplace_back(Choice::And, 4);
      choices.emplace_back(Choice::Or, 3);
      choices.emplace_back(Choice::Implies, 2);
      if (shape_.announcements && !shape_.mu_only) choices.emplace_back(Choice::Announce, 3);
    }
    const Choice choice = pick(choices);
    switch (choice) {
      case Choice::Not: return Formula::negate(gen(size - 1, !negated));
      case Choice::Box: return Formula::box(gen(size - 1, negated));
      case Choice::Diamond: return Formula::diamond(gen(size - 1, negated));
      case Choice::Global: return Formula::global(gen(size - 1, negated));
      case Choice::ExistsGlobal: return Formula::exists_global(gen(size - 1, negated));
      case Choice::Action: {
        const EventName& e = events_->event(rng_.below(events_->size()));
        return Formula::action(e, gen(size - 1, negated));
      }
      case Choice::Exists:
        --quantifiers_left_;
        return bound(Connective::Exists, size, negated);
      case Choice::Forall:
        --quantifiers_left_;
        return bound(Connective::Forall, size, negated);
      case Choice::Nu: return bound(Connective::Nu, size, negated);
      case Choice::And:
      case Choice::Or:
      case Choice::Implies:
        return binary(choice, size, negated);
      case Choice::Announce: {
        const std::size_t a_size = rng_.between(1, std::min<std::size_t>(3, size - 2));
        FormulaShape static_shape;
        static_shape.max_size = a_size;
        static_shape.global = shape_.global;
        FormulaGen inner(rng_, props_, static_shape, nullptr);
        inner.scopes_ = scopes_;
        for (auto& s : inner.scopes_) s.blocked = s.nu;
        Formula announced = inner.gen(a_size, false);
        return Formula::announce(std::move(announced), gen(size - 1 - a_size, negated));
      }
    }
    return leaf(negated);
  }

  Choice pick(const std::vector<std::pair<Choice, std::size_t>>& weighted) {
    std::size_t total = 0;
    for (const auto& [_, w] : weighted) total += w;
    std::size_t roll = rng_.below(total);
    for (const auto& [c, w] : weighted) {
      if (roll < w) return c;
      roll -= w;
    }
    return weighted.back().first;
  }

  Formula binary(Choice choice, std::size_t size, bool negated) {
    const std::size_t left_size = rng_.between(1, size - 2);
    if (choice == Choice::Implies) {
      Formula l = gen(left_size, !negated);
      return Formula::implies(std::move(l), gen(size - 1 - left_size, negated));
    }
    Formula l = gen(left_size, negated);
    Formula r = gen(size - 1 - left_size, negated);
    return choice == Choice::And ? Formula::conj(std::move(l), std::move(r)) : Formula::disj(std::move(l), std::move(r));
  }

  Rng& rng_;
  const std::vector<PropName>& props_;
  FormulaShape shape_;
  const EventModel* events_;
  std::size_t quantifiers_left_;
  std::vector<Scope> scopes_;
  std::optional<PropName> favourite_;
};

}  // namespace

Formula random_shaped_formula(Rng& rng, const std::vector<PropName>& props, const FormulaShape& shape,
                              const EventModel* events) {
  FormulaGen gen(rng, props, shape, events);
  return gen.generate(rng.between(1, std::max<std::size_t>(shape.max_size, 1)));
}

Formula random_positive_body(Rng& rng, const std::vector<PropName>& props, const PropName& var,
                             std::size_t max_size) {
  FormulaShape shape;
  shape.max_size = max_size;
  shape.mu_only = true;
  FormulaGen gen(rng, props, shape, nullptr);
  gen.bind_nu(var);
  return gen.generate(rng.between(1, std::max<std::size_t>(max_size, 1)));
}

Formula random_formula(const FuzzConfig& cfg, std::uint64_t case_index, LanguageTag language) {
  Rng rng(cfg.seed, case_index, std::string("formula/") + to_string(language));
  const auto props = proposition_names(std::max<std::size_t>(cfg.max_props, 1));
  FormulaShape shape;
  shape.max_size = cfg.max_formula_size;
  shape.max_quantifiers = cfg.max_eps;
  switch (language) {
    case LanguageTag::BaseMso:
      break;
    case LanguageTag::ScopedNominals:
      shape.nominals = cfg.max_events;
      break;
    case LanguageTag::MuFragment: {
      const PropName var = props[rng.below(props.size())];
      const std::size_t body = std::max<std::size_t>(cfg.max_formula_size, 2) - 1;
      return Formula::nu(var, random_positive_body(rng, props, var, body));
    }
    default:
      throw Error(ErrorCode::InvalidArgument, std::string("no generator for language ") + to_string(language));
  }
  return random_shaped_formula(rng, props, shape);
}

// ---------------------------------------------------------------------------
// Suites

namespace {

using Clock = std::chrono::steady_clock;

using Instance = PinnedCase;

struct Mismatch {
  std::string message;
  std::string lhs;
  std::string rhs;
};

struct Outcome {
  std::optional<Mismatch> mismatch;
  std::optional<ErrorCode> error;

  bool failed() const { return mismatch.has_value(); }
};

struct Context {
  const FuzzConfig& cfg;
  const FuzzHooks& hooks;
  bool recording = true;
  std::size_t checks = 0;
  BlowupStats blowup;
  double ratio_sum = 0;
  double eps_sum = 0;
  TerminationStats termination;
};

std::string show(const WorldSet& set, const KripkeModel& m) {
  std::string out = "{";
  bool first = true;
  set.for_each([&](std::size_t i) {
    if (!first) out += ",";
    out += m.world(i);
    first = false;
  });
  return out + "}";
}

Mismatch differ(std::string message, const WorldSet& lhs, const WorldSet& rhs, const KripkeModel& m) {
  return Mismatch{std::move(message), show(lhs, m), show(rhs, m)};
}

Formula hooked_event(Context& ctx, const EventModel& a, std::size_t alpha, const Formula& psi,
                     const TranslateOptions& options) {
  if (ctx.hooks.translate_event) return ctx.hooks.translate_event(a, alpha, psi);
  return translate_event(a, alpha, psi, options);
}

Formula hooked_announcement(Context& ctx, const Formula& announced, const Formula& psi) {
  if (ctx.hooks.translate_announcement) return ctx.hooks.translate_announcement(announced, psi);
  return translate_announcement(announced, psi);
}

bool is_static_output(const Formula& f) { return classify(f) == LanguageTag::BaseMso; }

std::optional<Mismatch> check_translation(Context& ctx, const Instance& in) {
  const KripkeModel& m = in.model;
  const EventModel& a = *in.events;
  const EvalBudget& budget = ctx.cfg.budget;
  const TaggedModel product = product_update(m, a, budget);

  for (std::size_t alpha = 0; alpha < a.size(); ++alpha) {
    std::optional<Mismatch> measure_failure;
    TranslateOptions options;
    options.observer = [&](const Measure& parent, const Measure& child) {
      if (ctx.recording) ++ctx.termination.calls;
      if (!(child < parent)) {
        if (ctx.recording) ++ctx.termination.violations;
        if (!measure_failure) {
          measure_failure = Mismatch{"translation measure did not decrease",
                                     "(" + std::to_string(parent.eps) + "," + std::to_string(parent.size) + ")",
                                     "(" + std::to_string(child.eps) + "," + std::to_string(child.size) + ")"};
        }
      }
    };
    const Formula lhs_formula = Formula::action(a.event(alpha), in.formula);
    const WorldSet lhs = extension(m, lhs_formula, budget, &a);
    const Formula chi = hooked_event(ctx, a, alpha, in.formula, options);
    ++ctx.checks;
    if (measure_failure) return measure_failure;
    if (!is_static_output(chi)) return Mismatch{"translation output is not static", "", print_formula(chi)};
    const WorldSet rhs = extension(m, chi, budget);
    if (lhs != rhs) return differ("extension of <" + a.event(alpha) + "> psi differs from its translation", lhs, rhs, m);

    const WorldSet pre = extension(m, a.pre(alpha), budget);
    if (!lhs.is_subset_of(pre)) return differ("action holds outside its precondition", lhs, pre, m);
    WorldSet via_product(m.size());
    pre.for_each([&](std::size_t w) {
      if (holds(product, *product_world(product, w, alpha), in.formula, budget, &a)) via_product.set(w);
    });
    if (via_product != lhs) return differ("action clause disagrees with the product", lhs, via_product, m);

    if (ctx.recording) {
      const double ratio = static_cast<double>(chi.size()) / static_cast<double>(lhs_formula.size());
      const std::size_t eps = quantifier_count(chi);
      ++ctx.blowup.samples;
      ctx.ratio_sum += ratio;
      ctx.eps_sum += static_cast<double>(eps);
      ctx.blowup.max_size_ratio = std::max(ctx.blowup.max_size_ratio, ratio);
      ctx.blowup.max_output_eps = std::max(ctx.blowup.max_output_eps, eps);
    }
  }
  return std::nullopt;
}

std::optional<Mismatch> check_announcement(Context& ctx, const Instance& in) {
  const KripkeModel& m = in.model;
  const Formula& a = *in.announced;
  const EvalBudget& budget = ctx.cfg.budget;

  const WorldSet lhs = extension(m, Formula::announce(a, in.formula), budget);
  const Formula chi = hooked_announcement(ctx, a, in.formula);
  ++ctx.checks;
  if (!is_static_output(chi)) return Mismatch{"announcement output is not static", "", print_formula(chi)};
  const WorldSet rhs = extension(m, chi, budget);
  if (lhs != rhs) return differ("announcement differs from its translation", lhs, rhs, m);

  const EventModel single = announcement_event_model(a);
  const WorldSet as_product = extension(m, Formula::action(single.event(0), in.formula), budget, &single);
  if (as_product != lhs) return differ("announcement differs from the one-event product", lhs, as_product, m);
  const WorldSet cross = extension(m, hooked_event(ctx, single, 0, in.formula, {}), budget);
  if (cross != rhs) return differ("announcement translation differs from event translation", rhs, cross, m);

  const TaggedModel product = product_update(m, single, budget);
  const KripkeModel restricted = relativise(m, extension(m, a, budget));
  if (product.model.size() != restricted.size() || product.model.edge_count() != restricted.edge_count()) {
    return Mismatch{"one-event product is not the relativisation", std::to_string(product.model.size()),
                    std::to_string(restricted.size())};
  }
  for (const auto& [from, to] : product.model.edges()) {
    const auto f = restricted.index_of(m.world(product.origin[from]));
    const auto t = restricted.index_of(m.world(product.origin[to]));
    if (!f || !t || !restricted.has_edge(*f, *t)) {
      return Mismatch{"one-event product edge missing from the relativisation", product.model.world(from),
                      product.model.world(to)};
    }
  }

  const auto props = proposition_names(std::max<std::size_t>(ctx.cfg.max_props, 1));
  for (const auto& p : props) {
    if (occurs_free(a, p)) continue;
    const Formula quantified = Formula::exists(p, in.formula);
    const WorldSet left = extension(m, Formula::announce(a, quantified), budget);
    const Formula pushed = Formula::exists(
        p, Formula::conj(Formula::global(Formula::implies(Formula::atom(p), a)), Formula::announce(a, in.formula)));
    const WorldSet right = extension(m, pushed, budget);
    ++ctx.checks;
    if (left != right) return differ("quantifier does not commute with the announcement", left, right, m);
    break;
  }
  return std::nullopt;
}

std::optional<Mismatch> check_nominals(Context& ctx, const Instance& in) {
  const KripkeModel& m = in.model;
  const EventModel& a = *in.events;
  const EvalBudget& budget = ctx.cfg.budget;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const WorldSet pre = extension(m, a.pre(i), budget);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Formula phi = Formula::action(a.event(i), Formula::nominal(k));
      const WorldSet lhs = extension(m, phi, budget, &a);
      const WorldSet expected = i == k ? pre : m.none();
      ++ctx.checks;
      if (lhs != expected) return differ("nominal axiom fails for " + print_formula(phi), lhs, expected, m);
      const WorldSet translated = extension(m, hooked_event(ctx, a, i, Formula::nominal(k), {}), budget);
      if (translated != expected) return differ("nominal translation fails for " + print_formula(phi), translated, expected, m);
    }
  }
  return std::nullopt;
}

std::optional<Mismatch> check_fixpoint(Context& ctx, const Instance& in) {
  if (!in.formula.is(Connective::Nu)) throw Error(ErrorCode::InvalidArgument, "fixpoint case without nu");
  const KripkeModel& m = in.model;
  const EvalBudget& budget = ctx.cfg.budget;
  const PropName& p = in.formula.name();
  const Formula& body = in.formula.operand();

  const WorldSet iterative = extension(m, in.formula, budget);
  const WorldSet oracle = gfp_oracle(m, p, body, budget);
  const WorldSet encoded = extension(m, encode_nu(p, body), budget);
  ++ctx.checks;
  if (iterative != oracle) return differ("iterative nu differs from the postfixpoint union", iterative, oracle, m);
  if (iterative != encoded) return differ("iterative nu differs from its quantifier encoding", iterative, encoded, m);
  const WorldSet image = apply_body(m, p, body, iterative, budget);
  if (image != iterative) return differ("nu result is not a fixpoint", iterative, image, m);
  return std::nullopt;
}

std::optional<Mismatch> check_bisim(Context& ctx, const Instance& in) {
  const KripkeModel& m1 = in.model;
  const EventModel& a = *in.events;
  const EvalBudget& budget = ctx.cfg.budget;
  KripkeModel m2 = m1;
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t c = 0; c < in.clones.size(); ++c) {
    const std::size_t w = in.clones[c] % m1.size();
    m2 = clone_world(m2, w, "c" + std::to_string(c));
    expected.emplace_back(w, m2.size() - 1);
  }
  for (std::size_t w = 0; w < m1.size(); ++w) expected.emplace_back(w, w);

  const Bisimulation z = greatest_bisimulation(m1, m2);
  ++ctx.checks;
  if (!is_bisimulation(m1, m2, z)) return Mismatch{"greatest bisimulation fails its own clauses", "", ""};
  for (const auto& [s, t] : expected) {
    if (!z.contains(s, t)) return Mismatch{"cloned world is not bisimilar to its source", m1.world(s), m2.world(t)};
  }
  const LiftedBisimulation lifted = lift_bisimulation(z, a, m1, m2, budget);
  if (!is_bisimulation(lifted.left.model, lifted.right.model, lifted.relation)) {
    return Mismatch{"lifted relation is not a bisimulation of the products", "", ""};
  }
  const WorldSet left = extension(m1, in.formula, budget, &a);
  const WorldSet right = extension(m2, in.formula, budget, &a);
  for (const auto& [s, t] : z.pairs) {
    if (left.test(s) != right.test(t)) {
      return Mismatch{"formula distinguishes bisimilar points " + m1.world(s) + " and " + m2.world(t),
                      show(left, m1), show(right, m2)};
    }
  }
  return std::nullopt;
}

std::optional<Mismatch> check_degree_case(Context& ctx, const Instance& in) {
  const EventModel& a = *in.events;
  const EvalBudget& budget = ctx.cfg.budget;
  std::vector<std::size_t> pre_depths;
  for (const auto& pre : a.preconditions()) pre_depths.push_back(modal_depth(pre));
  const std::size_t d = modal_depth(in.formula);
  const std::size_t k = k_star(pre_depths, d);

  for (std::size_t alpha = 0; alpha < a.size(); ++alpha) {
    const Formula phi = Formula::action(a.event(alpha), in.formula);
    const DegreeCheckResult result = check_degree(phi, k, in.testset, budget, &a);
    ++ctx.checks;
    if (result.verdict == DegreeVerdict::Counterexample) {
      return Mismatch{"degree bound " + std::to_string(k) + " fails for " + print_formula(phi) + " at test model " +
                          std::to_string(*result.witness_index),
                      result.value_on_full ? "true" : "false", result.value_on_submodel ? "true" : "false"};
    }
  }
  for (std::size_t i = 0; i < in.testset.size(); ++i) {
    const auto& [model, point] = in.testset[i];
    const TaggedModel product = product_update(model, a, budget);
    const PointedModel ball = generated_submodel_k(model, point, k);
    const TaggedModel local_product = product_update(ball.model, a, budget);
    for (std::size_t alpha = 0; alpha < a.size(); ++alpha) {
      const auto pw = product_world(product, point, alpha);
      if (!pw) continue;
      const PointedModel around = generated_submodel_k(product.model, *pw, d);
      if (!is_named_submodel(around.model, local_product.model)) {
        return Mismatch{"product ball is not a submodel of the product of the ball", std::to_string(i),
                        product.model.world(*pw)};
      }
    }
  }
  return std::nullopt;
}

using Check = std::optional<Mismatch> (*)(Context&, const Instance&);

Check check_for(Suite suite) {
  switch (suite) {
    case Suite::Translation: return check_translation;
    case Suite::Announcement: return check_announcement;
    case Suite::Nominals: return check_nominals;
    case Suite::Fixpoint: return check_fixpoint;
    case Suite::BisimLift: return check_bisim;
    case Suite::Degree: return check_degree_case;
  }
  return check_translation;
}

Instance make_instance(const FuzzConfig& cfg, Suite suite, std::uint64_t index) {
  const std::string label = to_string(suite);
  const auto props = proposition_names(std::max<std::size_t>(cfg.max_props, 1));
  Rng rng(cfg.seed, index, label);
  Instance in{random_model(cfg, rng, cfg.max_worlds), std::nullopt, Formula::top(), std::nullopt, {}, {}};
  FormulaShape shape;
  shape.max_size = cfg.max_formula_size;
  switch (suite) {
    case Suite::Translation:
      in.events = random_event_model(cfg, rng, false);
      shape.max_quantifiers = cfg.max_eps;
      shape.nominals = in.events->size();
      in.formula = random_shaped_formula(rng, props, shape);
      break;
    case Suite::Announcement: {
      FormulaShape announced;
      announced.max_size = 5;
      announced.max_quantifiers = std::min<std::size_t>(cfg.max_eps, 1);
      in.announced = random_shaped_formula(rng, props, announced);
      shape.max_quantifiers = cfg.max_eps;
      in.formula = random_shaped_formula(rng, props, shape);
      break;
    }
    case Suite::Nominals:
      in.events = random_event_model(cfg, rng, false);
      break;
    case Suite::Fixpoint: {
      const PropName var = props[rng.below(props.size())];
      in.formula = Formula::nu(var, random_positive_body(rng, props, var, cfg.fixpoint_body_size));
      break;
    }
    case Suite::BisimLift: {
      in.events = random_event_model(cfg, rng, false);
      const std::size_t clones = rng.between(1, 2);
      for (std::size_t c = 0; c < clones; ++c) in.clones.push_back(rng.below(in.model.size()));
      shape.nu = true;
      shape.actions = true;
      shape.announcements = true;
      in.formula = random_shaped_formula(rng, props, shape, &*in.events);
      break;
    }
    case Suite::Degree: {
      in.events = random_event_model(cfg, rng, true);
      shape.global = false;
      shape.nominals = in.events->size();
      in.formula = random_shaped_formula(rng, props, shape);
      for (std::size_t t = 0; t < cfg.degree_testset; ++t) {
        KripkeModel m = random_model(cfg, rng, cfg.degree_max_worlds);
        const std::size_t point = rng.below(m.size());
        in.testset.push_back(PointedModel{std::move(m), point});
      }
      break;
    }
  }
  return in;
}

Outcome run_check(Check check, Context& ctx, const Instance& in) {
  try {
    if (auto mismatch = check(ctx, in)) return Outcome{std::move(mismatch), std::nullopt};
    return Outcome{};
  } catch (const Error& e) {
    return Outcome{Mismatch{e.what(), "", ""}, e.code()};
  } catch (const std::exception& e) {
    return Outcome{Mismatch{e.what(), "", ""}, ErrorCode::InvalidArgument};
  }
}

std::vector<Instance> shrink_candidates(const Instance& in) {
  std::vector<Instance> out;
  if (in.model.size() > 1) {
    for (std::size_t w = 0; w < in.model.size(); ++w) {
      Instance c = in;
      WorldSet keep = in.model.all();
      keep.reset(w);
      c.model = relativise(in.model, keep);
      out.push_back(std::move(c));
    }
  }
  auto formula_variants = [&](const Formula& f, auto assign) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (const Formula& constant : {Formula::top(), Formula::bottom()}) {
        Formula replaced = replace_at(f, i, constant);
        if (replaced == f) continue;
        Instance c = in;
        assign(c, std::move(replaced));
        out.push_back(std::move(c));
      }
    }
  };
  formula_variants(in.formula, [](Instance& c, Formula f) { c.formula = std::move(f); });
  if (in.announced) {
    formula_variants(*in.announced, [](Instance& c, Formula f) { c.announced = std::move(f); });
  }
  return out;
}

bool same_failure(const Outcome& original, const Outcome& candidate) {
  return candidate.failed() && candidate.error == original.error;
}

FailureCase describe(std::uint64_t index, const Instance& in, const Mismatch& mismatch) {
  return FailureCase{index, mismatch.message, in.model, in.events, in.formula, in.announced, mismatch.lhs, mismatch.rhs};
}

FailureRecord shrink(Check check, Context& ctx, std::uint64_t index, const Instance& original, const Outcome& outcome) {
  FailureRecord record{describe(index, original, *outcome.mismatch), {}, 0};
  Instance current = original;
  Outcome current_outcome = outcome;
  const bool was_recording = ctx.recording;
  ctx.recording = false;
  constexpr std::size_t max_steps = 500;
  for (bool progress = true; progress && record.shrink_steps < max_steps;) {
    progress = false;
    for (Instance& candidate : shrink_candidates(current)) {
      Outcome o = run_check(check, ctx, candidate);
      if (same_failure(outcome, o)) {
        current = std::move(candidate);
        current_outcome = std::move(o);
        ++record.shrink_steps;
        progress = true;
        break;
      }
    }
  }
  ctx.recording = was_recording;
  record.shrunk = describe(index, current, *current_outcome.mismatch);
  return record;
}

}  // namespace

bool FuzzReport::ok() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.failed == 0; });
}

const SuiteReport* FuzzReport::find(Suite suite) const {
  for (const auto& s : suites) {
    if (s.suite == suite) return &s;
  }
  return nullptr;
}

FuzzReport run_fuzz(const FuzzConfig& cfg, const FuzzHooks& hooks) {
  cfg.validate();
  FuzzReport report;
  report.config = cfg;
  Context ctx{cfg, hooks, true, 0, {}, 0, 0, {}};
  for (Suite suite : cfg.suites) {
    if (report.find(suite) != nullptr) continue;
    SuiteReport sr;
    sr.suite = suite;
    const Check check = check_for(suite);
    const std::size_t checks_before = ctx.checks;
    const auto suite_start = Clock::now();
    for (std::uint64_t i = 0; i < cfg.cases; ++i) {
      const auto start = Clock::now();
      const Instance in = make_instance(cfg, suite, i);
      const Outcome outcome = run_check(check, ctx, in);
      sr.max_case_seconds =
          std::max(sr.max_case_seconds, std::chrono::duration<double>(Clock::now() - start).count());
      if (!outcome.failed()) {
        ++sr.passed;
        continue;
      }
      ++sr.failed;
      if (!sr.first_failure) sr.first_failure = shrink(check, ctx, i, in, outcome);
    }
    sr.seconds = std::chrono::duration<double>(Clock::now() - suite_start).count();
    sr.checks = ctx.checks - checks_before;
    report.suites.push_back(std::move(sr));
  }
  report.blowup = ctx.blowup;
  if (ctx.blowup.samples > 0) {
    report.blowup.mean_size_ratio = ctx.ratio_sum / static_cast<double>(ctx.blowup.samples);
    report.blowup.mean_output_eps = ctx.eps_sum / static_cast<double>(ctx.blowup.samples);
  }
  report.termination = ctx.termination;
  return report;
}

SuiteReport run_pinned(Suite suite, const std::vector<PinnedCase>& cases, const FuzzConfig& cfg,
                       const FuzzHooks& hooks) {
  Context ctx{cfg, hooks, true, 0, {}, 0, 0, {}};
  SuiteReport sr;
  sr.suite = suite;
  const Check check = check_for(suite);
  const auto suite_start = Clock::now();
  for (std::uint64_t i = 0; i < cases.size(); ++i) {
    const auto start = Clock::now();
    const Outcome outcome = run_check(check, ctx, cases[i]);
    sr.max_case_seconds = std::max(sr.max_case_seconds, std::chrono::duration<double>(Clock::now() - start).count());
    if (!outcome.failed()) {
      ++sr.passed;
      continue;
    }
    ++sr.failed;
    if (!sr.first_failure) sr.first_failure = shrink(check, ctx, i, cases[i], outcome);
  }
  sr.seconds = std::chrono::duration<double>(Clock::now() - suite_start).count();
  sr.checks = ctx.checks;
  return sr;
}

namespace {

nlohmann::json failure_json(const FailureCase& f) {
  nlohmann::json j = {
      {"case_index", f.case_index},
      {"message", f.message},
      {"model", to_json(f.model)},
      {"formula", print_formula(f.formula)},
      {"lhs", f.lhs},
      {"rhs", f.rhs},
  };
  if (f.events) j["events"] = to_json(*f.events);
  if (f.announced) j["announced"] = print_formula(*f.announced);
  return j;
}

}  // namespace

nlohmann::json to_json(const FuzzReport& report, bool include_timing) {
  const FuzzConfig& c = report.config;
  nlohmann::json suites_json = nlohmann::json::array();
  nlohmann::json suite_names = nlohmann::json::array();
  for (Suite s : c.suites) suite_names.push_back(to_string(s));
  nlohmann::json timing = nlohmann::json::object();
  for (const auto& s : report.suites) {
    nlohmann::json j = {
        {"suite", to_string(s.suite)},
        {"cases", s.passed + s.failed},
        {"passed", s.passed},
        {"failed", s.failed},
        {"checks", s.checks},
    };
    if (s.first_failure) {
      j["first_failure"] = {
          {"original", failure_json(s.first_failure->original)},
          {"shrunk", failure_json(s.first_failure->shrunk)},
          {"shrink_steps", s.first_failure->shrink_steps},
      };
    }
    suites_json.push_back(std::move(j));
    timing[to_string(s.suite)] = {{"seconds", s.seconds}, {"max_case_seconds", s.max_case_seconds}};
  }
  nlohmann::json out = {
      {"config",
       {{"seed", c.seed},
        {"cases", c.cases},
        {"max_worlds", c.max_worlds},
        {"max_events", c.max_events},
        {"max_props", c.max_props},
        {"max_formula_size", c.max_formula_size},
        {"max_eps", c.max_eps},
        {"edge_probability", c.edge_probability},
        {"suites", suite_names}}},
      {"suites", std::move(suites_json)},
      {"blowup",
       {{"samples", report.blowup.samples},
        {"mean_size_ratio", report.blowup.mean_size_ratio},
        {"max_size_ratio", report.blowup.max_size_ratio},
        {"mean_output_eps", report.blowup.mean_output_eps},
        {"max_output_eps", report.blowup.max_output_eps}}},
      {"termination", {{"calls", report.termination.calls}, {"violations", report.termination.violations}}},
      {"ok", report.ok()},
  };
  if (include_timing) out["timing"] = std::move(timing);
  return out;
}

}  // namespace produpd

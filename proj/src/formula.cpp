#include "produpd/formula.hpp"

#include <algorithm>
#include <functional>

#include "produpd/error.hpp"

namespace produpd {

struct Formula::Node {
  Connective kind;
  std::string name;
  std::size_t index;
  Formula a;
  Formula b;
  std::size_t size;
};

namespace {

int arity(Connective c) {
  switch (c) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
    case Connective::Nominal:
      return 0;
    case Connective::And:
    case Connective::Or:
    case Connective::Implies:
    case Connective::Announce:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

Formula Formula::make(Connective kind, std::string name, std::size_t index, Formula a, Formula b, int n) {
  std::size_t size = 1;
  if (n >= 1) size += a.size();
  if (n >= 2) size += b.size();
  return Formula(std::make_shared<const Node>(Node{kind, std::move(name), index, std::move(a), std::move(b), size}));
}

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const Formula t = make(Connective::Top, {}, 0, Formula(nullptr), Formula(nullptr), 0);
  return t;
}

Formula Formula::bottom() {
  static const Formula f = make(Connective::Bottom, {}, 0, Formula(nullptr), Formula(nullptr), 0);
  return f;
}

Formula Formula::atom(PropName name) {
  return make(Connective::Atom, std::move(name), 0, Formula(nullptr), Formula(nullptr), 0);
}

Formula Formula::nominal(std::size_t index) {
  return make(Connective::Nominal, {}, index, Formula(nullptr), Formula(nullptr), 0);
}

Formula Formula::negate(Formula body) { return make(Connective::Not, {}, 0, std::move(body), Formula(nullptr), 1); }
Formula Formula::conj(Formula l, Formula r) { return make(Connective::And, {}, 0, std::move(l), std::move(r), 2); }
Formula Formula::disj(Formula l, Formula r) { return make(Connective::Or, {}, 0, std::move(l), std::move(r), 2); }
Formula Formula::implies(Formula l, Formula r) {
  return make(Connective::Implies, {}, 0, std::move(l), std::move(r), 2);
}
Formula Formula::box(Formula body) { return make(Connective::Box, {}, 0, std::move(body), Formula(nullptr), 1); }
Formula Formula::diamond(Formula body) {
  return make(Connective::Diamond, {}, 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::exists(PropName var, Formula body) {
  return make(Connective::Exists, std::move(var), 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::forall(PropName var, Formula body) {
  return make(Connective::Forall, std::move(var), 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::global(Formula body) {
  return make(Connective::Global, {}, 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::exists_global(Formula body) {
  return make(Connective::ExistsGlobal, {}, 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::action(EventName event, Formula body) {
  return make(Connective::Action, std::move(event), 0, std::move(body), Formula(nullptr), 1);
}
Formula Formula::announce(Formula announced, Formula body) {
  return make(Connective::Announce, {}, 0, std::move(announced), std::move(body), 2);
}
Formula Formula::nu(PropName var, Formula body) {
  return make(Connective::Nu, std::move(var), 0, std::move(body), Formula(nullptr), 1);
}

Formula Formula::conj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return top();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
  return acc;
}

Formula Formula::disj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return bottom();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = disj(acc, parts[i]);
  return acc;
}

Connective Formula::kind() const noexcept { return node_->kind; }
bool Formula::is_binary() const noexcept { return arity(node_->kind) == 2; }
bool Formula::is_binder() const noexcept {
  return node_->kind == Connective::Exists || node_->kind == Connective::Forall || node_->kind == Connective::Nu;
}
const std::string& Formula::name() const noexcept { return node_->name; }
std::size_t Formula::nominal_index() const noexcept { return node_->index; }
const Formula& Formula::operand() const noexcept {
  return node_->kind == Connective::Announce ? node_->b : node_->a;
}
const Formula& Formula::left() const noexcept { return node_->a; }
const Formula& Formula::right() const noexcept { return node_->b; }
const Formula& Formula::announced() const noexcept { return node_->a; }
std::size_t Formula::size() const noexcept { return node_->size; }
const void* Formula::id() const noexcept { return node_.get(); }

Formula Formula::with_children(Formula first, Formula second) const {
  if (first.node_ == node_->a.node_ && second.node_ == node_->b.node_) return *this;
  return make(node_->kind, node_->name, node_->index, std::move(first), std::move(second), 2);
}

Formula Formula::with_child(Formula child) const {
  if (child.node_ == node_->a.node_) return *this;
  return make(node_->kind, node_->name, node_->index, std::move(child), Formula(nullptr), 1);
}

bool operator==(const Formula& x, const Formula& y) noexcept {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  if (a.kind != b.kind || a.size != b.size || a.index != b.index || a.name != b.name) return false;
  const int n = arity(a.kind);
  if (n >= 1 && !(a.a == b.a)) return false;
  if (n >= 2 && !(a.b == b.b)) return false;
  return true;
}

const char* to_string(LanguageTag tag) {
  switch (tag) {
    case LanguageTag::BaseMso: return "BaseMso";
    case LanguageTag::ActionMso: return "ActionMso";
    case LanguageTag::ScopedNominals: return "ScopedNominals";
    case LanguageTag::SentenceOnly: return "SentenceOnly";
    case LanguageTag::MuFragment: return "MuFragment";
  }
  return "?";
}

Polarity flip(Polarity p) {
  switch (p) {
    case Polarity::Positive: return Polarity::Negative;
    case Polarity::Negative: return Polarity::Positive;
    default: return p;
  }
}

namespace {

void collect_free(const Formula& f, std::vector<PropName>& bound, std::set<PropName>& out) {
  switch (f.kind()) {
    case Connective::Atom:
      if (std::find(bound.begin(), bound.end(), f.name()) == bound.end()) out.insert(f.name());
      return;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Nominal:
      return;
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu:
      bound.push_back(f.name());
      collect_free(f.operand(), bound, out);
      bound.pop_back();
      return;
    default:
      if (f.is_binary()) {
        collect_free(f.left(), bound, out);
        collect_free(f.right(), bound, out);
      } else {
        collect_free(f.operand(), bound, out);
      }
  }
}

void collect_all(const Formula& f, std::set<PropName>& out) {
  switch (f.kind()) {
    case Connective::Atom:
      out.insert(f.name());
      return;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Nominal:
      return;
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu:
      out.insert(f.name());
      collect_all(f.operand(), out);
      return;
    default:
      if (f.is_binary()) {
        collect_all(f.left(), out);
        collect_all(f.right(), out);
      } else {
        collect_all(f.operand(), out);
      }
  }
}

template <class Visit>
void preorder(const Formula& f, Visit&& visit) {
  visit(f);
  if (f.kind() == Connective::Top || f.kind() == Connective::Bottom || f.kind() == Connective::Atom ||
      f.kind() == Connective::Nominal) {
    return;
  }
  if (f.is_binary()) {
    preorder(f.left(), visit);
    preorder(f.right(), visit);
  } else {
    preorder(f.operand(), visit);
  }
}

}  // namespace

std::set<PropName> free_props(const Formula& phi) {
  std::set<PropName> out;
  std::vector<PropName> bound;
  collect_free(phi, bound, out);
  return out;
}

std::set<PropName> all_props(const Formula& phi) {
  std::set<PropName> out;
  collect_all(phi, out);
  return out;
}

bool occurs_free(const Formula& phi, const PropName& p) { return polarity(phi, p) != Polarity::None; }

std::size_t quantifier_nodes(const Formula& phi) {
  std::size_t n = 0;
  preorder(phi, [&](const Formula& f) {
    if (f.is(Connective::Exists) || f.is(Connective::Forall)) ++n;
  });
  return n;
}

std::size_t quantifier_count(const Formula& phi) {
  std::size_t n = 0;
  preorder(phi, [&](const Formula& f) {
    if (f.is(Connective::Nu) || f.is(Connective::Announce)) {
      throw Error(ErrorCode::InvalidArgument,
                  "quantifier count is undefined on formulas with nu or announcement nodes");
    }
    if (f.is(Connective::Exists) || f.is(Connective::Forall)) ++n;
  });
  return n;
}

std::size_t modal_depth(const Formula& phi) {
  switch (phi.kind()) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
    case Connective::Nominal:
      return 0;
    case Connective::Box:
    case Connective::Diamond:
      return 1 + modal_depth(phi.operand());
    default:
      if (phi.is_binary()) return std::max(modal_depth(phi.left()), modal_depth(phi.right()));
      return modal_depth(phi.operand());
  }
}

bool is_reserved_name(const std::string& name) { return !name.empty() && name.front() == '_'; }

std::vector<PropName> fresh_props(std::size_t count, const std::set<PropName>& avoid) {
  std::vector<PropName> out;
  out.reserve(count);
  for (std::size_t k = 0; out.size() < count; ++k) {
    PropName candidate = "_f" + std::to_string(k);
    if (!avoid.contains(candidate)) out.push_back(std::move(candidate));
  }
  return out;
}

namespace {

Formula subst(const Formula& phi, const PropName& target, const Formula& replacement,
              const std::set<PropName>& repl_free) {
  switch (phi.kind()) {
    case Connective::Atom:
      return phi.name() == target ? replacement : phi;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Nominal:
      return phi;
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu: {
      if (phi.name() == target || !occurs_free(phi.operand(), target)) return phi;
      if (repl_free.contains(phi.name())) {
        std::set<PropName> avoid = all_props(phi.operand());
        avoid.insert(repl_free.begin(), repl_free.end());
        avoid.insert(target);
        const PropName renamed = fresh_props(1, avoid).front();
        const Formula body = subst(phi.operand(), phi.name(), Formula::atom(renamed), {renamed});
        const Formula result = subst(body, target, replacement, repl_free);
        switch (phi.kind()) {
          case Connective::Exists: return Formula::exists(renamed, result);
          case Connective::Forall: return Formula::forall(renamed, result);
          default: return Formula::nu(renamed, result);
        }
      }
      return phi.with_child(subst(phi.operand(), target, replacement, repl_free));
    }
    default:
      if (phi.is_binary()) {
        return phi.with_children(subst(phi.left(), target, replacement, repl_free),
                                 subst(phi.right(), target, replacement, repl_free));
      }
      return phi.with_child(subst(phi.operand(), target, replacement, repl_free));
  }
}

}  // namespace

Formula substitute(const Formula& phi, const PropName& target, const Formula& replacement) {
  return subst(phi, target, replacement, free_props(replacement));
}

Polarity polarity(const Formula& phi, const PropName& p) {
  switch (phi.kind()) {
    case Connective::Atom:
      return phi.name() == p ? Polarity::Positive : Polarity::None;
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Nominal:
      return Polarity::None;
    case Connective::Not:
      return flip(polarity(phi.operand(), p));
    case Connective::Implies:
      return join(flip(polarity(phi.left(), p)), polarity(phi.right(), p));
    case Connective::And:
    case Connective::Or:
      return join(polarity(phi.left(), p), polarity(phi.right(), p));
    case Connective::Announce: {
      const Polarity in_announced = polarity(phi.announced(), p);
      const Polarity in_body = polarity(phi.operand(), p);
      return in_announced == Polarity::None ? in_body : Polarity::Mixed;
    }
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu:
      return phi.name() == p ? Polarity::None : polarity(phi.operand(), p);
    default:
      return polarity(phi.operand(), p);
  }
}

void check_positivity(const Formula& phi) {
  preorder(phi, [](const Formula& f) {
    if (f.is(Connective::Nu)) {
      const Polarity pol = polarity(f.operand(), f.name());
      if (pol == Polarity::Negative || pol == Polarity::Mixed) {
        throw Error(ErrorCode::PositivityViolation, "nu body is not positive in '" + f.name() + "'");
      }
    }
  });
}

namespace {

struct Scan {
  bool nominal_outside = false;
  bool nominal_any = false;
  bool dynamic = false;
  bool nu = false;
  bool non_mu = false;
};

void scan(const Formula& f, bool under_action, Scan& s) {
  switch (f.kind()) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
      return;
    case Connective::Nominal:
      s.nominal_any = true;
      s.non_mu = true;
      if (!under_action) s.nominal_outside = true;
      return;
    case Connective::Action:
      s.dynamic = true;
      s.non_mu = true;
      scan(f.operand(), true, s);
      return;
    case Connective::Announce:
      s.dynamic = true;
      s.non_mu = true;
      scan(f.announced(), under_action, s);
      scan(f.operand(), under_action, s);
      return;
    case Connective::Nu:
      s.nu = true;
      scan(f.operand(), under_action, s);
      return;
    case Connective::Not:
    case Connective::Box:
    case Connective::Diamond:
      scan(f.operand(), under_action, s);
      return;
    case Connective::And:
    case Connective::Or:
    case Connective::Implies:
      scan(f.left(), under_action, s);
      scan(f.right(), under_action, s);
      return;
    default:
      s.non_mu = true;
      scan(f.operand(), under_action, s);
  }
}

}  // namespace

LanguageTag classify(const Formula& phi) {
  check_positivity(phi);
  Scan s;
  scan(phi, false, s);
  if (s.nominal_outside) return LanguageTag::SentenceOnly;
  if (s.nominal_any) return LanguageTag::ScopedNominals;
  if (s.dynamic) return LanguageTag::ActionMso;
  if (s.nu) return s.non_mu ? LanguageTag::ActionMso : LanguageTag::MuFragment;
  return LanguageTag::BaseMso;
}

bool contains(const Formula& phi, Connective kind) {
  bool found = false;
  preorder(phi, [&](const Formula& f) { found = found || f.is(kind); });
  return found;
}

namespace {

Formula replace_rec(const Formula& f, std::size_t& remaining, const Formula& replacement) {
  if (remaining == 0) {
    remaining = static_cast<std::size_t>(-1);
    return replacement;
  }
  --remaining;
  if (f.is(Connective::Top) || f.is(Connective::Bottom) || f.is(Connective::Atom) || f.is(Connective::Nominal)) {
    return f;
  }
  if (f.is_binary()) {
    Formula l = replace_rec(f.left(), remaining, replacement);
    if (remaining == static_cast<std::size_t>(-1)) return f.with_children(l, f.right());
    Formula r = replace_rec(f.right(), remaining, replacement);
    return f.with_children(l, r);
  }
  return f.with_child(replace_rec(f.operand(), remaining, replacement));
}

}  // namespace

Formula replace_at(const Formula& phi, std::size_t index, const Formula& replacement) {
  if (index >= phi.size()) throw Error(ErrorCode::InvalidArgument, "subformula position out of range");
  std::size_t remaining = index;
  return replace_rec(phi, remaining, replacement);
}

Formula simplify(const Formula& phi) {
  using C = Connective;
  const auto is_top = [](const Formula& f) { return f.is(C::Top); };
  const auto is_bot = [](const Formula& f) { return f.is(C::Bottom); };
  switch (phi.kind()) {
    case C::Top:
    case C::Bottom:
    case C::Atom:
    case C::Nominal:
      return phi;
    case C::Not: {
      Formula b = simplify(phi.operand());
      if (is_top(b)) return Formula::bottom();
      if (is_bot(b)) return Formula::top();
      return phi.with_child(b);
    }
    case C::And: {
      Formula l = simplify(phi.left()), r = simplify(phi.right());
      if (is_bot(l) || is_bot(r)) return Formula::bottom();
      if (is_top(l)) return r;
      if (is_top(r)) return l;
      return phi.with_children(l, r);
    }
    case C::Or: {
      Formula l = simplify(phi.left()), r = simplify(phi.right());
      if (is_top(l) || is_top(r)) return Formula::top();
      if (is_bot(l)) return r;
      if (is_bot(r)) return l;
      return phi.with_children(l, r);
    }
    case C::Implies: {
      Formula l = simplify(phi.left()), r = simplify(phi.right());
      if (is_bot(l) || is_top(r)) return Formula::top();
      if (is_top(l)) return r;
      if (is_bot(r)) return Formula::negate(l);
      return phi.with_children(l, r);
    }
    case C::Box:
    case C::Global: {
      Formula b = simplify(phi.operand());
      if (is_top(b)) return b;
      if (phi.is(C::Global) && is_bot(b)) return b;
      return phi.with_child(b);
    }
    case C::Diamond:
    case C::ExistsGlobal: {
      Formula b = simplify(phi.operand());
      if (is_bot(b)) return b;
      if (phi.is(C::ExistsGlobal) && is_top(b)) return b;
      return phi.with_child(b);
    }
    case C::Exists:
    case C::Forall:
    case C::Nu: {
      Formula b = simplify(phi.operand());
      if (is_top(b) || is_bot(b)) return b;
      return phi.with_child(b);
    }
    case C::Action: {
      Formula b = simplify(phi.operand());
      if (is_bot(b)) return b;
      return phi.with_child(b);
    }
    case C::Announce: {
      Formula a = simplify(phi.announced()), b = simplify(phi.operand());
      if (is_bot(a) || is_bot(b)) return Formula::bottom();
      if (is_top(a)) return b;
      if (is_top(b)) return a;
      return phi.with_children(a, b);
    }
  }
  return phi;
}

}  // namespace produpd

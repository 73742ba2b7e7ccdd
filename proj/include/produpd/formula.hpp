#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace produpd {

using PropName = std::string;
using EventName = std::string;

/// Node kinds of the formula AST. `Or`, `Implies`, `Diamond`, `Forall`,
/// `ExistsGlobal`, `Top` and `Bottom` are display forms of derived
/// connectives; semantic and measure operations treat them by expansion.
enum class Connective : unsigned char {
  Top,
  Bottom,
  Atom,
  Nominal,
  Not,
  And,
  Or,
  Implies,
  Box,
  Diamond,
  Exists,
  Forall,
  Global,
  ExistsGlobal,
  Action,
  Announce,
  Nu,
};

/// Immutable formula value. Copies share structure.
class Formula {
 public:
  /// The default formula is `true`.
  Formula();

  static Formula top();
  static Formula bottom();
  static Formula atom(PropName name);
  static Formula nominal(std::size_t index);
  static Formula negate(Formula body);
  static Formula conj(Formula left, Formula right);
  static Formula disj(Formula left, Formula right);
  static Formula implies(Formula left, Formula right);
  static Formula box(Formula body);
  static Formula diamond(Formula body);
  static Formula exists(PropName var, Formula body);
  static Formula forall(PropName var, Formula body);
  static Formula global(Formula body);
  static Formula exists_global(Formula body);
  static Formula action(EventName event, Formula body);
  static Formula announce(Formula announced, Formula body);
  static Formula nu(PropName var, Formula body);

  /// Left-folded conjunction; the empty conjunction is `true`.
  static Formula conj_all(const std::vector<Formula>& parts);
  /// Left-folded disjunction; the empty disjunction is `false`.
  static Formula disj_all(const std::vector<Formula>& parts);

  Connective kind() const noexcept;
  bool is(Connective c) const noexcept { return kind() == c; }
  bool is_binary() const noexcept;
  bool is_binder() const noexcept;

  /// Proposition of an atom, bound variable of a binder, or event of an action.
  const std::string& name() const noexcept;
  std::size_t nominal_index() const noexcept;
  /// Operand of unary nodes, binders, actions, and the body of announcements.
  const Formula& operand() const noexcept;
  const Formula& left() const noexcept;
  const Formula& right() const noexcept;
  const Formula& announced() const noexcept;

  /// Number of AST nodes.
  std::size_t size() const noexcept;

  /// Identity of the shared node; stable for the lifetime of any copy.
  const void* id() const noexcept;

  /// Rebuilds this node with new children, keeping kind, name and index.
  Formula with_children(Formula first, Formula second) const;
  Formula with_child(Formula child) const;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept { return !(a == b); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Connective kind, std::string name, std::size_t index, Formula a, Formula b, int arity);

  std::shared_ptr<const Node> node_;
};

/// Language strata, smallest first along the chain
/// BaseMso < ActionMso < ScopedNominals < SentenceOnly. MuFragment sits
/// beside the chain and is reported for formulas built only from nu, box,
/// Boolean connectives and atoms that contain at least one nu.
enum class LanguageTag { BaseMso, ActionMso, ScopedNominals, SentenceOnly, MuFragment };

const char* to_string(LanguageTag tag);

enum class Polarity : unsigned char { None = 0, Positive = 1, Negative = 2, Mixed = 3 };

inline Polarity join(Polarity a, Polarity b) {
  return static_cast<Polarity>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
Polarity flip(Polarity p);

std::set<PropName> free_props(const Formula& phi);
/// Every proposition name occurring in phi, free or bound.
std::set<PropName> all_props(const Formula& phi);
bool occurs_free(const Formula& phi, const PropName& p);

/// Number of propositional quantifier nodes (exists and forall). Throws
/// InvalidArgument on nu or announcement nodes, where the measure is not defined.
std::size_t quantifier_count(const Formula& phi);
/// Same count, but tolerates every node kind. Used for reporting.
std::size_t quantifier_nodes(const Formula& phi);

std::size_t modal_depth(const Formula& phi);

/// Capture-avoiding substitution of `replacement` for free occurrences of `target`.
Formula substitute(const Formula& phi, const PropName& target, const Formula& replacement);

/// `count` distinct names `_f<k>` not in `avoid`, smallest counters first.
std::vector<PropName> fresh_props(std::size_t count, const std::set<PropName>& avoid);

bool is_reserved_name(const std::string& name);

/// Polarity of the free occurrences of p. Occurrences inside an announced
/// formula count as mixed, since relativisation is not monotone in them.
Polarity polarity(const Formula& phi, const PropName& p);

/// Throws PositivityViolation if some nu body is not positive in its variable.
void check_positivity(const Formula& phi);

/// Least language tag admitting phi; validates nu positivity.
LanguageTag classify(const Formula& phi);

bool contains(const Formula& phi, Connective kind);

/// Replaces the subformula at preorder position `index` (0 is phi itself).
Formula replace_at(const Formula& phi, std::size_t index, const Formula& replacement);

/// Boolean constant folding: removes `true`/`false` where they absorb or are
/// neutral. No other rewriting.
Formula simplify(const Formula& phi);

}  // namespace produpd

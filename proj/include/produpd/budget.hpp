#pragma once

#include <cstddef>
#include <cstdint>

namespace produpd {

/// Limits for exhaustive evaluation. Quantifiers enumerate subsets of the
/// domain, so evaluation refuses quantified formulas over large models
/// instead of running for hours.
struct EvalBudget {
  std::size_t max_worlds_for_quantifier = 16;
  std::uint64_t max_total_subset_enumerations = std::uint64_t{1} << 26;
  /// Use polarity and guard analysis to skip subsets that cannot change the
  /// result. Off means plain enumeration of every subset.
  bool prune_quantifiers = true;
};

/// Reads PRODUPD_BUDGET_WORLDS, if set, into max_worlds_for_quantifier.
EvalBudget budget_from_environment();

}  // namespace produpd

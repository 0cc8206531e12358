#pragma once

// Nelder-Mead simplex search with fixed coefficients, following the ordering
// and tie-breaking rules of Lagarias, Reeds, Wright & Wright (1998).

#include <cstdint>
#include <optional>
#include <string_view>

#include "greybox/contopt/domain.hpp"
#include "greybox/contopt/simplex.hpp"

namespace greybox::contopt {

struct NMCoefficients {
  double reflection = 1.0;   // alpha
  double expansion = 2.0;    // gamma
  double contraction = 0.5;  // rho
  double shrink = 0.5;       // sigma
};

struct NMConfig {
  std::uint64_t max_evals = 1000;
  /// Stop when max f - min f over the simplex is at most f_tol.
  double f_tol = 1e-10;
  /// Stop when the simplex diameter is at most x_tol.
  double x_tol = 1e-10;
  NMCoefficients coefficients;

  /// Throws Error{BudgetZero} for max_evals = 0, Error{InvalidConfig} for
  /// negative tolerances or coefficients outside alpha > 0, gamma > 1,
  /// 0 < rho < 1, 0 < sigma < 1.
  void validate() const;
};

enum class Termination { FTol, XTol, Budget, DegenerateStall };
std::string_view to_string(Termination t);

struct HistoryEntry {
  /// 1-based index of the evaluation.
  std::uint64_t eval_index = 0;
  double best_f = 0.0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct NMResult {
  Vector best_x;
  double best_f = 0.0;
  std::uint64_t evals_used = 0;
  std::uint64_t iterations = 0;
  Termination termination = Termination::Budget;
  /// One entry per evaluation with the best value seen so far.
  std::vector<HistoryEntry> history;

  /// First evaluation index whose best-so-far value is below `target`.
  std::optional<std::uint64_t> evals_to_reach(double target) const;
};

/// Consecutive zero-volume, zero-spread iterations before DegenerateStall is
/// declared, per dimension.
inline constexpr std::uint64_t kStallIterationsPerDimension = 2;

/// Throws Error{InvalidArgument} when the simplex does not have n+1 points of
/// the objective's dimension.
NMResult nelder_mead(const Objective& f, const Simplex& s0, const NMConfig& cfg);

}  // namespace greybox::contopt

#pragma once

// Four-letter constraint classification (Le Digabel & Wild): quantifiable /
// nonquantifiable, relaxable / unrelaxable, a-priori / simulation-based,
// known / hidden. Letters are rendered in that order, e.g. "QRAK", "NUSH".

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greybox/ternary.hpp"

namespace greybox::qrak {

class QrakCode {
 public:
  enum class Quantifiable : char { Q = 'Q', N = 'N' };
  enum class Relaxable : char { R = 'R', U = 'U' };
  enum class Timing : char { A = 'A', S = 'S' };
  enum class Knowledge : char { K = 'K', H = 'H' };

  /// Throws Error{InconsistentFlags} for hidden codes other than NUSH.
  QrakCode(Quantifiable q, Relaxable r, Timing a, Knowledge k);

  /// The single code a hidden constraint can have.
  static QrakCode hidden();
  /// Parses a rendered code such as "QRAK". Throws Error{Parse}.
  static QrakCode parse(std::string_view rendered);

  Quantifiable q() const noexcept { return q_; }
  Relaxable r() const noexcept { return r_; }
  Timing a() const noexcept { return a_; }
  Knowledge k() const noexcept { return k_; }

  bool is_hidden() const noexcept { return k_ == Knowledge::H; }
  bool is_simulation_based() const noexcept { return a_ == Timing::S; }

  std::string rendered() const;

  friend bool operator==(const QrakCode&, const QrakCode&) = default;
  friend auto operator<=>(const QrakCode& a, const QrakCode& b) {
    return a.rendered() <=> b.rendered();
  }

 private:
  Quantifiable q_;
  Relaxable r_;
  Timing a_;
  Knowledge k_;
};

/// Derives the code from checklist answers.
///
/// A hidden constraint (known = false) is always NUSH; answering "yes" to any
/// of the other three questions for it is a contradiction (InconsistentFlags),
/// while "no" or "unknown" are accepted. A known constraint needs definite
/// answers to all three questions, otherwise Error{Unclassifiable}.
QrakCode classify(bool known, Ternary a_priori, Ternary relaxable, Ternary quantifiable);

/// Like classify() but returns nullopt instead of Unclassifiable. Still throws
/// InconsistentFlags.
std::optional<QrakCode> try_classify(bool known, Ternary a_priori, Ternary relaxable,
                                     Ternary quantifiable);

/// The eight known classes {Q,N}x{R,U}x{A,S}xK, sorted by rendered string.
std::vector<QrakCode> enumerate_known_classes();

enum class HintCategory { FaultySoftware, SimulationExpensive, APrioriStandard };

std::string_view to_string(HintCategory c);

struct Hint {
  HintCategory category;
  /// One line per applicable treatment note, joined with "; ".
  std::string text;
  /// Version of the shipped hint table the text came from.
  int table_version = 0;
};

/// Advisory treatment text for a code, looked up in the shipped hint table.
Hint treatment_hint(const QrakCode& code);

}  // namespace greybox::qrak

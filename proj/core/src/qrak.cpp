#include "greybox/qrak.hpp"

#include <algorithm>

#include "embedded_data.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::qrak {

QrakCode::QrakCode(Quantifiable q, Relaxable r, Timing a, Knowledge k)
    : q_(q), r_(r), a_(a), k_(k) {
  if (k == Knowledge::H && (q != Quantifiable::N || r != Relaxable::U || a != Timing::S)) {
    throw Error(ErrorKind::InconsistentFlags,
                "a hidden constraint must be nonquantifiable, unrelaxable and simulation-based (NUSH)");
  }
}

QrakCode QrakCode::hidden() {
  return {Quantifiable::N, Relaxable::U, Timing::S, Knowledge::H};
}

QrakCode QrakCode::parse(std::string_view s) {
  auto bad = [&] {
    throw Error(ErrorKind::Parse, "invalid QRAK code '" + std::string(s) + "'",
                {{"code", std::string(s)}});
  };
  if (s.size() != 4) bad();
  if (s[0] != 'Q' && s[0] != 'N') bad();
  if (s[1] != 'R' && s[1] != 'U') bad();
  if (s[2] != 'A' && s[2] != 'S') bad();
  if (s[3] != 'K' && s[3] != 'H') bad();
  try {
    return {static_cast<Quantifiable>(s[0]), static_cast<Relaxable>(s[1]),
            static_cast<Timing>(s[2]), static_cast<Knowledge>(s[3])};
  } catch (const Error&) {
    bad();
  }
  return hidden();  // unreachable
}

std::string QrakCode::rendered() const {
  return {static_cast<char>(q_), static_cast<char>(r_), static_cast<char>(a_),
          static_cast<char>(k_)};
}

std::optional<QrakCode> try_classify(bool known, Ternary a_priori, Ternary relaxable,
                                     Ternary quantifiable) {
  if (!known) {
    if (a_priori == Ternary::Yes || relaxable == Ternary::Yes || quantifiable == Ternary::Yes) {
      throw Error(ErrorKind::InconsistentFlags,
                  "hidden constraints are necessarily NUSH; a-priori, relaxable and quantifiable "
                  "cannot be 'yes'",
                  {{"a_priori", to_string(a_priori)},
                   {"relaxable", to_string(relaxable)},
                   {"quantifiable", to_string(quantifiable)}});
    }
    return QrakCode::hidden();
  }
  if (a_priori == Ternary::Unknown || relaxable == Ternary::Unknown ||
      quantifiable == Ternary::Unknown) {
    return std::nullopt;
  }
  using Q = QrakCode;
  return Q(quantifiable == Ternary::Yes ? Q::Quantifiable::Q : Q::Quantifiable::N,
           relaxable == Ternary::Yes ? Q::Relaxable::R : Q::Relaxable::U,
           a_priori == Ternary::Yes ? Q::Timing::A : Q::Timing::S, Q::Knowledge::K);
}

QrakCode classify(bool known, Ternary a_priori, Ternary relaxable, Ternary quantifiable) {
  auto code = try_classify(known, a_priori, relaxable, quantifiable);
  if (!code) {
    throw Error(ErrorKind::Unclassifiable,
                "a known constraint needs yes/no answers for a-priori, relaxable and quantifiable",
                {{"a_priori", to_string(a_priori)},
                 {"relaxable", to_string(relaxable)},
                 {"quantifiable", to_string(quantifiable)}});
  }
  return *code;
}

std::vector<QrakCode> enumerate_known_classes() {
  using Q = QrakCode;
  std::vector<QrakCode> out;
  for (auto q : {Q::Quantifiable::N, Q::Quantifiable::Q})
    for (auto r : {Q::Relaxable::R, Q::Relaxable::U})
      for (auto a : {Q::Timing::A, Q::Timing::S}) out.emplace_back(q, r, a, Q::Knowledge::K);
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(HintCategory c) {
  switch (c) {
    case HintCategory::FaultySoftware: return "FaultySoftware";
    case HintCategory::SimulationExpensive: return "SimulationExpensive";
    case HintCategory::APrioriStandard: return "APrioriStandard";
  }
  return "";
}

namespace {

struct HintTable {
  int version = 0;
  std::string hidden, a_priori, simulation, unrelaxable, relaxable_quantifiable;
};

const HintTable& hint_table() {
  static const HintTable table = [] {
    auto doc = json_util::parse_document(detail::qrak_hints_json());
    json_util::ObjectReader root(doc, "");
    HintTable t;
    t.version = static_cast<int>(root.integer("version"));
    json_util::ObjectReader notes(root.object("notes"), "notes");
    t.hidden = notes.string("hidden");
    t.a_priori = notes.string("a_priori");
    t.simulation = notes.string("simulation");
    t.unrelaxable = notes.string("unrelaxable");
    t.relaxable_quantifiable = notes.string("relaxable_quantifiable");
    notes.finish();
    root.finish();
    return t;
  }();
  return table;
}

}  // namespace

Hint treatment_hint(const QrakCode& code) {
  const auto& table = hint_table();
  if (code.is_hidden()) return {HintCategory::FaultySoftware, table.hidden, table.version};

  Hint hint{code.is_simulation_based() ? HintCategory::SimulationExpensive
                                       : HintCategory::APrioriStandard,
            "", table.version};
  auto add = [&](const std::string& line) {
    if (!hint.text.empty()) hint.text += "; ";
    hint.text += line;
  };
  add(code.is_simulation_based() ? table.simulation : table.a_priori);
  if (code.r() == QrakCode::Relaxable::U) add(table.unrelaxable);
  if (code.r() == QrakCode::Relaxable::R && code.q() == QrakCode::Quantifiable::Q)
    add(table.relaxable_quantifiable);
  return hint;
}

}  // namespace greybox::qrak

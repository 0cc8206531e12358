#pragma once

// Factor classification, full-factorial designs, robust configuration
// selection and structured experiment reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace greybox::experiment {

enum class Category { Response, Controllable, Observable, Noise };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

struct RawFactor {
  std::string name;
  Category category = Category::Controllable;
  std::vector<std::string> levels;
};

struct FactorSpec {
  std::string name;
  Category category = Category::Controllable;
  /// Unique labels; empty for responses.
  std::vector<std::string> levels;

  friend bool operator==(const FactorSpec&, const FactorSpec&) = default;
};

/// Validates names and levels. `conditioning` lists the factors a selection
/// will be conditioned on; naming a noise factor there is rejected.
/// Errors: DuplicateName, ResponseWithLevels, NoiseConditioning,
/// InvalidArgument (empty names or levels, duplicate labels, '|' in a label,
/// unknown conditioning factor).
std::vector<FactorSpec> classify_factors(const std::vector<RawFactor>& raw,
                                         const std::vector<std::string>& conditioning = {});

/// factor name -> level label
using Assignment = std::map<std::string, std::string>;

struct Design {
  /// Sorted by name.
  std::vector<FactorSpec> factors;
  /// One level per non-response factor. Ordered like an odometer over the
  /// factors sorted by name (first name most significant), levels in
  /// declaration order.
  std::vector<Assignment> cells;
  std::size_t replicates = 1;

  std::size_t runs() const noexcept { return cells.size() * replicates; }
  const FactorSpec* find(std::string_view name) const;
  std::vector<const FactorSpec*> of(Category c) const;

  friend bool operator==(const Design&, const Design&) = default;
};

/// Errors: MissingControllable, MissingResponse, InvalidArgument for
/// replicates = 0 or invalid factors.
Design full_factorial(std::vector<FactorSpec> factors, std::size_t replicates = 1);

struct RunRecord {
  Assignment cell;
  /// 0-based, below design.replicates.
  std::size_t replicate = 0;
  std::map<std::string, double> responses;
  std::int64_t seed = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

enum class Aggregation { Mean, WorstCase };
enum class Direction { Minimize, Maximize };

std::string_view to_string(Aggregation a);
std::string_view to_string(Direction d);
std::optional<Aggregation> aggregation_from_string(std::string_view s);
std::optional<Direction> direction_from_string(std::string_view s);

/// Aggregated values within this relative distance of the best count as
/// tied; ties go to the controllable assignment with the smallest level
/// indices (compared factor by factor in name order).
inline constexpr double kTieTolerance = 1e-12;

struct Choice {
  Assignment controllable;
  double value = 0.0;

  friend bool operator==(const Choice&, const Choice&) = default;
};

struct Selection {
  std::string response;
  Aggregation aggregation = Aggregation::Mean;
  Direction direction = Direction::Minimize;
  /// Observable assignment (empty when there are no observable factors) ->
  /// best controllable assignment aggregated over noise levels and
  /// replicates.
  std::map<Assignment, Choice> by_observable;

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Errors: UnknownResponse; IncompleteRuns listing missing (cell, replicate)
/// pairs; InvalidArgument for runs outside the design, duplicates or runs
/// lacking a declared response.
Selection robust_select(const Design& design, const std::vector<RunRecord>& runs,
                        const std::string& response, Aggregation aggregation, Direction direction);

// --- reports -----------------------------------------------------------------

enum class Section {
  ResearchQuestion,
  PreExperimentalPlanning,
  Task,
  Setup,
  Results,
  Observations,
  Discussion,
};

std::string_view title(Section s);
std::string_view to_string(Section s);
std::optional<Section> section_from_string(std::string_view s);
const std::vector<Section>& all_sections();

struct ReportMetadata {
  std::string title;
  /// In any order; several bodies for one section are joined by blank lines.
  std::vector<std::pair<Section, std::string>> bodies;
};

struct ReportSection {
  Section section;
  std::string body;

  friend bool operator==(const ReportSection&, const ReportSection&) = default;
};

struct ReportSkeleton {
  std::string title;
  /// Always the seven sections in canonical order.
  std::vector<ReportSection> sections;

  friend bool operator==(const ReportSkeleton&, const ReportSkeleton&) = default;
};

ReportSkeleton report_skeleton(const ReportMetadata& metadata = {});

/// Skeleton whose pre-experimental planning section carries guide-sheet
/// prompts (objectives, responses, factors held constant, nuisance
/// factors...). Authored text for that section is appended after them.
ReportSkeleton guide_sheet_skeleton(const ReportMetadata& metadata = {});

/// Markdown. The results section embeds the design dimensions and one table
/// per selection, including the aggregation that was used.
std::string render_report(const ReportSkeleton& skeleton, const Design* design,
                          const std::vector<Selection>& selections);

// --- files -------------------------------------------------------------------

/// factor,category,levels,replicates ; levels joined by '|'.
std::string write_design_csv(const Design& design);
Design parse_design_csv(std::string_view text);

/// replicate,seed,<factor columns by name>,<response columns by name>
std::string write_runs_csv(const Design& design, const std::vector<RunRecord>& runs);
std::vector<RunRecord> parse_runs_csv(const Design& design, std::string_view text);

}  // namespace greybox::experiment

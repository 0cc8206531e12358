#include <sstream>

#include "greybox/csv.hpp"
#include "greybox/experiment.hpp"

namespace greybox::experiment {

namespace {

struct SectionName {
  Section section;
  std::string_view key;
  std::string_view title;
};

constexpr SectionName kSections[] = {
    {Section::ResearchQuestion, "research_question", "Research question"},
    {Section::PreExperimentalPlanning, "pre_experimental_planning", "Pre-experimental planning"},
    {Section::Task, "task", "Task"},
    {Section::Setup, "setup", "Setup"},
    {Section::Results, "results", "Results"},
    {Section::Observations, "observations", "Observations"},
    {Section::Discussion, "discussion", "Discussion"},
};

constexpr std::string_view kGuideSheetPrompts =
    "- Objective of the experiment: what should be learned, and which decision depends on it?\n"
    "- Response variables: what is measured, in which unit, and how precisely?\n"
    "- Controllable factors: which are varied, over which levels, and why those levels?\n"
    "- Factors held constant: which settings are fixed for all runs, and at what value?\n"
    "- Observable factors: which known problem properties (e.g. dimension) condition the choice?\n"
    "- Nuisance and noise factors: what varies uncontrolled (seeds, instances), and how is it averaged?\n"
    "- Expected interactions between factors.\n"
    "- Restrictions: budget, run time, hardware, number of replicates.\n"
    "- Design: which factorial design, how many runs, run order.\n"
    "- Analysis plan: how the best configuration will be selected and reported.";

std::string join_bodies(const ReportMetadata& meta, Section s) {
  std::string out;
  for (const auto& [section, body] : meta.bodies) {
    if (section != s || body.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += body;
  }
  return out;
}

}  // namespace

std::string_view title(Section s) {
  for (const auto& e : kSections)
    if (e.section == s) return e.title;
  return "";
}

std::string_view to_string(Section s) {
  for (const auto& e : kSections)
    if (e.section == s) return e.key;
  return "";
}

std::optional<Section> section_from_string(std::string_view s) {
  for (const auto& e : kSections)
    if (e.key == s) return e.section;
  return std::nullopt;
}

const std::vector<Section>& all_sections() {
  static const std::vector<Section> all = [] {
    std::vector<Section> v;
    for (const auto& e : kSections) v.push_back(e.section);
    return v;
  }();
  return all;
}

ReportSkeleton report_skeleton(const ReportMetadata& metadata) {
  ReportSkeleton r;
  r.title = metadata.title;
  for (Section s : all_sections()) r.sections.push_back({s, join_bodies(metadata, s)});
  return r;
}

ReportSkeleton guide_sheet_skeleton(const ReportMetadata& metadata) {
  ReportSkeleton r = report_skeleton(metadata);
  auto& planning = r.sections[static_cast<std::size_t>(Section::PreExperimentalPlanning)];
  std::string body(kGuideSheetPrompts);
  if (!planning.body.empty()) body += "\n\n" + planning.body;
  planning.body = std::move(body);
  return r;
}

namespace {

std::string cell_text(const Assignment& a) {
  std::string s;
  for (const auto& [k, v] : a) s += (s.empty() ? "" : ", ") + k + "=" + v;
  return s.empty() ? "(all)" : s;
}

void design_table(std::ostringstream& os, const Design& d) {
  os << "#### Design\n\n";
  os << "| factor | category | levels | values |\n|---|---|---:|---|\n";
  for (const auto& f : d.factors) {
    std::string values;
    for (const auto& l : f.levels) values += (values.empty() ? "" : ", ") + l;
    os << "| " << f.name << " | " << to_string(f.category) << " | " << f.levels.size() << " | " << values
       << " |\n";
  }
  os << "\nCells: " << d.cells.size() << ", replicates: " << d.replicates << ", runs: " << d.runs() << "\n\n";
}

void selection_table(std::ostringstream& os, const Selection& s) {
  os << "#### Robust selection for " << s.response << "\n\n";
  os << "Aggregation over noise levels and replicates: " << to_string(s.aggregation)
     << "; direction: " << to_string(s.direction) << ".\n\n";
  os << "| observable levels | selected configuration | " << to_string(s.aggregation) << " |\n|---|---|---:|\n";
  for (const auto& [obs, choice] : s.by_observable)
    os << "| " << cell_text(obs) << " | " << cell_text(choice.controllable) << " | "
       << csv::format_number(choice.value) << " |\n";
  os << "\n";
}

}  // namespace

std::string render_report(const ReportSkeleton& skeleton, const Design* design,
                          const std::vector<Selection>& selections) {
  // Whatever order the sections arrive in, they are rendered canonically.
  std::ostringstream os;
  os << "# " << (skeleton.title.empty() ? "Experiment report" : skeleton.title) << "\n\n";
  for (Section s : all_sections()) {
    std::string body;
    for (const auto& rs : skeleton.sections)
      if (rs.section == s && !rs.body.empty()) body += (body.empty() ? "" : "\n\n") + rs.body;
    os << "## " << title(s) << "\n\n";
    if (!body.empty()) os << body << "\n\n";
    if (s == Section::Results) {
      if (design) design_table(os, *design);
      for (const auto& sel : selections) selection_table(os, sel);
    }
  }
  std::string out = os.str();
  while (out.size() >= 2 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') out.pop_back();
  return out;
}

}  // namespace greybox::experiment

#include "greybox/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "greybox/errors.hpp"

namespace greybox::experiment {

namespace {

constexpr std::pair<Category, std::string_view> kCategories[] = {
    {Category::Response, "response"},
    {Category::Controllable, "controllable"},
    {Category::Observable, "observable"},
    {Category::Noise, "noise"},
};

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kCategories)
    if (cat == c) return name;
  return "";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (const auto& [cat, name] : kCategories)
    if (name == s) return cat;
  return std::nullopt;
}

std::string_view to_string(Aggregation a) { return a == Aggregation::Mean ? "mean" : "worst_case"; }
std::string_view to_string(Direction d) { return d == Direction::Minimize ? "minimize" : "maximize"; }

std::optional<Aggregation> aggregation_from_string(std::string_view s) {
  if (s == "mean") return Aggregation::Mean;
  if (s == "worst_case") return Aggregation::WorstCase;
  return std::nullopt;
}

std::optional<Direction> direction_from_string(std::string_view s) {
  if (s == "minimize") return Direction::Minimize;
  if (s == "maximize") return Direction::Maximize;
  return std::nullopt;
}

std::vector<FactorSpec> classify_factors(const std::vector<RawFactor>& raw,
                                         const std::vector<std::string>& conditioning) {
  std::vector<FactorSpec> out;
  std::set<std::string> names;
  for (const auto& f : raw) {
    if (f.name.empty()) throw Error(ErrorKind::InvalidArgument, "factor names must not be empty");
    if (!names.insert(f.name).second)
      throw Error(ErrorKind::DuplicateName, "factor '" + f.name + "' is declared twice", {{"factor", f.name}});
    if (f.category == Category::Response) {
      if (!f.levels.empty())
        throw Error(ErrorKind::ResponseWithLevels, "response '" + f.name + "' must not declare levels",
                    {{"factor", f.name}, {"levels", f.levels}});
    } else {
      if (f.levels.empty())
        throw Error(ErrorKind::InvalidArgument, "factor '" + f.name + "' needs at least one level",
                    {{"factor", f.name}});
      std::set<std::string> labels;
      for (const auto& level : f.levels) {
        if (level.empty() || level.find('|') != std::string::npos)
          throw Error(ErrorKind::InvalidArgument,
                      "factor '" + f.name + "': level labels must be non-empty and must not contain '|'",
                      {{"factor", f.name}, {"level", level}});
        if (!labels.insert(level).second)
          throw Error(ErrorKind::InvalidArgument, "factor '" + f.name + "' repeats level '" + level + "'",
                      {{"factor", f.name}, {"level", level}});
      }
    }
    out.push_back({f.name, f.category, f.levels});
  }
  for (const auto& name : conditioning) {
    auto it = std::find_if(out.begin(), out.end(), [&](const FactorSpec& f) { return f.name == name; });
    if (it == out.end())
      throw Error(ErrorKind::InvalidArgument, "selection conditions on unknown factor '" + name + "'",
                  {{"factor", name}});
    if (it->category == Category::Noise)
      throw Error(ErrorKind::NoiseConditioning,
                  "noise factor '" + name + "' cannot condition a selection; results are aggregated over it",
                  {{"factor", name}});
  }
  return out;
}

const FactorSpec* Design::find(std::string_view name) const {
  for (const auto& f : factors)
    if (f.name == name) return &f;
  return nullptr;
}

std::vector<const FactorSpec*> Design::of(Category c) const {
  std::vector<const FactorSpec*> out;
  for (const auto& f : factors)
    if (f.category == c) out.push_back(&f);
  return out;
}

Design full_factorial(std::vector<FactorSpec> factors, std::size_t replicates) {
  std::vector<RawFactor> raw;
  for (const auto& f : factors) raw.push_back({f.name, f.category, f.levels});
  classify_factors(raw);
  if (replicates == 0) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");

  std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  Design d;
  d.factors = std::move(factors);
  d.replicates = replicates;
  if (d.of(Category::Controllable).empty())
    throw Error(ErrorKind::MissingControllable, "a design needs at least one controllable factor");
  if (d.of(Category::Response).empty())
    throw Error(ErrorKind::MissingResponse, "a design needs at least one response");

  std::vector<const FactorSpec*> varied;
  for (const auto& f : d.factors)
    if (f.category != Category::Response) varied.push_back(&f);

  std::vector<std::size_t> idx(varied.size(), 0);
  for (;;) {
    Assignment cell;
    for (std::size_t k = 0; k < varied.size(); ++k) cell[varied[k]->name] = varied[k]->levels[idx[k]];
    d.cells.push_back(std::move(cell));
    std::size_t k = varied.size();
    while (k > 0) {
      --k;
      if (++idx[k] < varied[k]->levels.size()) break;
      idx[k] = 0;
      if (k == 0) return d;
    }
    if (varied.empty()) return d;
  }
}

namespace {

std::size_t level_index(const FactorSpec& f, const std::string& label) {
  return static_cast<std::size_t>(std::find(f.levels.begin(), f.levels.end(), label) - f.levels.begin());
}

std::string describe(const Assignment& a) {
  std::string s;
  for (const auto& [k, v] : a) s += (s.empty() ? "" : ", ") + k + "=" + v;
  return s.empty() ? "(all)" : s;
}

}  // namespace

Selection robust_select(const Design& design, const std::vector<RunRecord>& runs,
                        const std::string& response, Aggregation aggregation, Direction direction) {
  const FactorSpec* target = design.find(response);
  if (!target || target->category != Category::Response)
    throw Error(ErrorKind::UnknownResponse, "'" + response + "' is not a declared response",
                {{"response", response}});

  std::map<std::pair<Assignment, std::size_t>, const RunRecord*> by_key;
  const std::set<Assignment> cells(design.cells.begin(), design.cells.end());
  const auto responses = design.of(Category::Response);
  for (const auto& run : runs) {
    if (!cells.count(run.cell) || run.replicate >= design.replicates)
      throw Error(ErrorKind::InvalidArgument,
                  "run (" + describe(run.cell) + ", replicate " + std::to_string(run.replicate) +
                      ") is not part of the design");
    for (const auto* r : responses)
      if (!run.responses.count(r->name))
        throw Error(ErrorKind::InvalidArgument,
                    "run (" + describe(run.cell) + ") lacks response '" + r->name + "'", {{"response", r->name}});
    if (!by_key.emplace(std::make_pair(run.cell, run.replicate), &run).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate run (" + describe(run.cell) + ", replicate " +
                                                  std::to_string(run.replicate) + ")");
  }
  nlohmann::json missing = nlohmann::json::array();
  for (const auto& cell : design.cells)
    for (std::size_t r = 0; r < design.replicates; ++r)
      if (!by_key.count({cell, r})) missing.push_back({{"cell", cell}, {"replicate", r}});
  if (!missing.empty())
    throw Error(ErrorKind::IncompleteRuns,
                std::to_string(missing.size()) + " of " + std::to_string(design.runs()) + " runs are missing",
                {{"missing", missing}});

  // Group values by (observable assignment, controllable assignment) in cell
  // order so that floating-point accumulation order is fixed.
  struct Group {
    double sum = 0.0;
    double worst = 0.0;
    std::size_t count = 0;
  };
  std::map<Assignment, std::map<Assignment, Group>> groups;
  for (const auto& cell : design.cells) {
    Assignment obs, ctl;
    for (const auto& [name, level] : cell) {
      const auto cat = design.find(name)->category;
      if (cat == Category::Observable) obs[name] = level;
      if (cat == Category::Controllable) ctl[name] = level;
    }
    auto& g = groups[obs][ctl];
    for (std::size_t r = 0; r < design.replicates; ++r) {
      const double v = by_key.at({cell, r})->responses.at(response);
      g.sum += v;
      const bool worse = direction == Direction::Minimize ? v > g.worst : v < g.worst;
      if (g.count == 0 || worse) g.worst = v;
      ++g.count;
    }
  }

  const auto controllables = design.of(Category::Controllable);
  auto rank_key = [&](const Assignment& a) {
    std::vector<std::size_t> key;
    for (const auto* f : controllables) key.push_back(level_index(*f, a.at(f->name)));
    return key;
  };

  Selection sel{response, aggregation, direction, {}};
  for (const auto& [obs, by_ctl] : groups) {
    std::vector<std::pair<Assignment, double>> values;
    for (const auto& [ctl, g] : by_ctl)
      values.emplace_back(ctl, aggregation == Aggregation::Mean ? g.sum / static_cast<double>(g.count) : g.worst);
    double best = values.front().second;
    for (const auto& [_, v] : values)
      best = direction == Direction::Minimize ? std::min(best, v) : std::max(best, v);
    const Choice* chosen = nullptr;
    Choice candidate;
    for (const auto& [ctl, v] : values) {
      if (std::abs(v - best) > kTieTolerance * std::max(std::abs(v), std::abs(best))) continue;
      if (!chosen || rank_key(ctl) < rank_key(candidate.controllable)) {
        candidate = {ctl, v};
        chosen = &candidate;
      }
    }
    sel.by_observable.emplace(obs, candidate);
  }
  return sel;
}

}  // namespace greybox::experiment

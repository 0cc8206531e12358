#include <algorithm>
#include <set>

#include "greybox/csv.hpp"
#include "greybox/errors.hpp"
#include "greybox/experiment.hpp"

namespace greybox::experiment {

namespace {

[[noreturn]] void bad(const std::string& what, std::size_t line) {
  throw Error(ErrorKind::Parse, what + " (line " + std::to_string(line) + ")", {{"line", line}});
}

void expect_header(const csv::Row& got, const csv::Row& want) {
  if (got != want) {
    std::string w;
    for (const auto& c : want) w += (w.empty() ? "" : ",") + c;
    bad("expected header '" + w + "'", 1);
  }
}

std::vector<std::string> split_levels(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto bar = s.find('|', start);
    out.push_back(s.substr(start, bar - start));
    if (bar == std::string::npos) return out;
    start = bar + 1;
  }
}

std::vector<std::string> run_columns(const Design& d) {
  std::vector<std::string> cols{"replicate", "seed"};
  for (const auto& f : d.factors)
    if (f.category != Category::Response) cols.push_back(f.name);
  for (const auto& f : d.factors)
    if (f.category == Category::Response) cols.push_back(f.name);
  return cols;
}

}  // namespace

std::string write_design_csv(const Design& design) {
  std::string out = csv::format_row({"factor", "category", "levels", "replicates"});
  for (const auto& f : design.factors) {
    std::string levels;
    for (const auto& l : f.levels) levels += (levels.empty() ? "" : "|") + l;
    out += csv::format_row({f.name, std::string(to_string(f.category)), levels, std::to_string(design.replicates)});
  }
  return out;
}

Design parse_design_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) bad("empty design file", 1);
  expect_header(rows[0], {"factor", "category", "levels", "replicates"});
  std::vector<RawFactor> raw;
  std::optional<std::int64_t> replicates;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) bad("expected 4 columns", i + 1);
    auto cat = category_from_string(r[1]);
    if (!cat) bad("unknown category '" + r[1] + "'", i + 1);
    auto reps = csv::parse_integer(r[3], "replicates");
    if (replicates && *replicates != reps) bad("replicates must be the same on every row", i + 1);
    replicates = reps;
    raw.push_back({r[0], *cat, split_levels(r[2])});
  }
  if (!replicates || *replicates < 1) bad("replicates must be >= 1", 2);
  return full_factorial(classify_factors(raw), static_cast<std::size_t>(*replicates));
}

std::string write_runs_csv(const Design& design, const std::vector<RunRecord>& runs) {
  const auto cols = run_columns(design);
  std::string out = csv::format_row(cols);
  for (const auto& run : runs) {
    csv::Row row{std::to_string(run.replicate), std::to_string(run.seed)};
    for (std::size_t c = 2; c < cols.size(); ++c) {
      const auto* f = design.find(cols[c]);
      if (f->category == Category::Response) {
        auto it = run.responses.find(cols[c]);
        row.push_back(it == run.responses.end() ? "" : csv::format_number(it->second));
      } else {
        auto it = run.cell.find(cols[c]);
        row.push_back(it == run.cell.end() ? "" : it->second);
      }
    }
    out += csv::format_row(row);
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(const Design& design, std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) bad("empty runs file", 1);
  const auto cols = run_columns(design);
  expect_header(rows[0], cols);
  std::vector<RunRecord> runs;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != cols.size()) bad("expected " + std::to_string(cols.size()) + " columns", i + 1);
    RunRecord run;
    auto rep = csv::parse_integer(r[0], "replicate");
    if (rep < 0) bad("replicate must be >= 0", i + 1);
    run.replicate = static_cast<std::size_t>(rep);
    run.seed = csv::parse_integer(r[1], "seed");
    for (std::size_t c = 2; c < cols.size(); ++c) {
      const auto* f = design.find(cols[c]);
      if (f->category == Category::Response)
        run.responses[cols[c]] = csv::parse_number(r[c], cols[c]);
      else if (std::find(f->levels.begin(), f->levels.end(), r[c]) == f->levels.end())
        bad("'" + r[c] + "' is not a level of " + cols[c], i + 1);
      else
        run.cell[cols[c]] = r[c];
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace greybox::experiment

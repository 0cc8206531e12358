#pragma once

// Cross-product benchmark of simplex initialization rules:
// functions x starts x rules x replicates, one Nelder-Mead run per cell.

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "greybox/contopt/nelder_mead.hpp"
#include "greybox/contopt/simplex.hpp"
#include "greybox/contopt/test_functions.hpp"
#include "greybox/experiment.hpp"

namespace greybox::contopt {

struct BenchConfig {
  std::vector<TestFunction> functions;
  std::vector<Vector> starts;
  std::vector<InitRule> rules;
  NMConfig nm;
  /// Replicate 0 runs from the given start; replicates r >= 1 add a uniform
  /// perturbation in [-perturbation, perturbation] to every coordinate.
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  double perturbation = 0.1;
  /// A run reaches the target once best_f < optimum_value + target_offset.
  double target_offset = 1e-3;
  /// Worker threads; the table does not depend on it.
  unsigned threads = 1;

  /// Throws Error{InvalidConfig} (empty lists, dimension mismatches,
  /// replicates = 0) or the NMConfig errors.
  void validate() const;
};

struct BenchRow {
  std::string function;
  /// Coordinates joined by ';', with "@r<k>" for replicates k >= 1.
  std::string start;
  std::string rule;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  SimplexQuality init;
  std::optional<std::uint64_t> evals_to_target;
  double best_f = 0.0;
  std::uint64_t evals_used = 0;
  Termination termination = Termination::Budget;
};

struct BenchTable {
  /// Sorted by (function, start, rule).
  std::vector<BenchRow> rows;
};

BenchTable benchmark_init_rules(const BenchConfig& cfg);

std::string start_label(const Vector& x);

/// function,start,rule,init_diameter,edge_ratio,evals_to_target,best_f,termination
/// evals_to_target is "NA" when the target was not reached.
std::string bench_to_csv(const BenchTable& table);
std::string bench_to_markdown(const BenchTable& table, const BenchConfig& cfg);

/// {"functions": [{"name", "dimension", "center"?}], "starts": [[...]],
///  "rules": ["pfeffer", "nash", "roi:0.5"], "nm": {...}?, "replicates"?,
///  "seed"?, "perturbation"?, "target_offset"?, "threads"?}
BenchConfig parse_bench_config(std::string_view document);

/// The benchmark as a designed experiment: rule is controllable, function is
/// observable, start and replicate are noise. Responses are evals_to_target
/// (max_evals + 1 when the target was missed) and best_f.
std::pair<experiment::Design, std::vector<experiment::RunRecord>> bench_experiment(
    const BenchTable& table, const BenchConfig& cfg);

}  // namespace greybox::contopt

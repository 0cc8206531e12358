#pragma once

// Random small designs and a brute-force robust selection oracle.

#include <algorithm>
#include <optional>
#include <random>

#include "greybox/experiment.hpp"

namespace greybox::testing {

using namespace experiment;

inline FactorSpec factor(const std::string& name, Category c, std::vector<std::string> levels = {}) {
  return {name, c, std::move(levels)};
}

struct RandomDesign {
  Design design;
  std::vector<RunRecord> runs;
};

inline RandomDesign random_design(std::mt19937_64& rng, bool integer_responses) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<FactorSpec> fs;
  auto levels = [&](const std::string& prefix) {
    std::vector<std::string> l;
    const int n = pick(1, 3);
    for (int i = 0; i < n; ++i) l.push_back(prefix + std::to_string(i));
    return l;
  };
  const int nc = pick(1, 2), no = pick(0, 2), nn = pick(0, 2);
  for (int i = 0; i < nc; ++i) fs.push_back(factor("c" + std::to_string(i), Category::Controllable, levels("L")));
  for (int i = 0; i < no; ++i) fs.push_back(factor("o" + std::to_string(i), Category::Observable, levels("O")));
  for (int i = 0; i < nn; ++i) fs.push_back(factor("n" + std::to_string(i), Category::Noise, levels("N")));
  fs.push_back(factor("y", Category::Response));
  fs.push_back(factor("z", Category::Response));
  RandomDesign out{full_factorial(fs, static_cast<std::size_t>(pick(1, 3))), {}};
  for (const auto& cell : out.design.cells)
    for (std::size_t r = 0; r < out.design.replicates; ++r) {
      RunRecord run{cell, r, {}, static_cast<std::int64_t>(r)};
      run.responses["y"] = integer_responses ? pick(0, 6) : std::uniform_real_distribution<double>(-5, 5)(rng);
      run.responses["z"] = pick(-3, 3);
      out.runs.push_back(run);
    }
  std::shuffle(out.runs.begin(), out.runs.end(), rng);
  return out;
}

// Brute force: enumerate every (observable, controllable) combination by
// level indices and scan all runs for matching ones.
inline std::map<Assignment, Assignment> oracle(const Design& d, const std::vector<RunRecord>& runs, const std::string& resp,
                                        Aggregation agg, Direction dir) {
  std::vector<const FactorSpec*> obs, ctl;
  for (const auto& f : d.factors) {
    if (f.category == Category::Observable) obs.push_back(&f);
    if (f.category == Category::Controllable) ctl.push_back(&f);
  }
  auto combos = [](const std::vector<const FactorSpec*>& fs) {
    std::vector<Assignment> out{{}};
    for (const auto* f : fs) {
      std::vector<Assignment> next;
      for (const auto& a : out)
        for (const auto& l : f->levels) {
          auto b = a;
          b[f->name] = l;
          next.push_back(b);
        }
      out = next;
    }
    return out;
  };
  std::map<Assignment, Assignment> result;
  for (const auto& o : combos(obs)) {
    std::optional<double> best;
    Assignment chosen;
    for (const auto& c : combos(ctl)) {  // lexicographic by level index
      double acc = 0.0;
      int n = 0;
      for (const auto& run : runs) {
        bool match = true;
        for (const auto& [k, v] : o) match &= run.cell.at(k) == v;
        for (const auto& [k, v] : c) match &= run.cell.at(k) == v;
        if (!match) continue;
        const double v = run.responses.at(resp);
        const double signed_v = dir == Direction::Minimize ? v : -v;
        acc = agg == Aggregation::Mean ? acc + signed_v : (n == 0 ? signed_v : std::max(acc, signed_v));
        ++n;
      }
      // Integer responses with equal counts per group: compare sums exactly.
      if (!best || acc < *best) {
        best = acc;
        chosen = c;
      }
    }
    result[o] = chosen;
  }
  return result;
}

}  // namespace greybox::testing

#include <benchmark/benchmark.h>

#include <random>

#include "greybox/experiment.hpp"
#include "greybox/problem_model.hpp"
#include "greybox/qrak.hpp"
#include "greybox/recommender.hpp"

namespace {

using namespace greybox;

model::ProblemSpec sample_spec() {
  model::ProblemSpec s;
  s.goal = model::GoalKind::FindBest;
  for (int i = 0; i < 3; ++i) {
    model::DecisionVariable v;
    v.name = "x" + std::to_string(i);
    v.dtype = model::DataType::Real;
    v.lower = 0.0;
    v.upper = 1.0;
    s.variables.push_back(v);
  }
  model::Objective o;
  o.name = "f";
  o.shape = model::Shape::Multimodal;
  o.global_structure = model::GlobalStructure::Funnel;
  o.domain_vars = {"x0", "x1", "x2"};
  s.objectives.push_back(o);
  model::Formulation f;
  f.selected_objectives = {"f"};
  f.selected_variables = {"x0", "x1", "x2"};
  f.paradigm = model::Paradigm::SingleObjective;
  s.formulation = f;
  return s;
}

void BM_Recommend(benchmark::State& state) {
  const auto spec = sample_spec();
  for (auto _ : state) benchmark::DoNotOptimize(recommend::recommend(spec));
}
BENCHMARK(BM_Recommend);

void BM_ValidateSpec(benchmark::State& state) {
  const auto spec = sample_spec();
  for (auto _ : state) benchmark::DoNotOptimize(model::validate_spec(spec));
}
BENCHMARK(BM_ValidateSpec);

void BM_QrakClassify(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(qrak::try_classify(true, Ternary::Yes, Ternary::No, Ternary::Yes));
}
BENCHMARK(BM_QrakClassify);

void BM_RobustSelect(benchmark::State& state) {
  using namespace experiment;
  const int levels = static_cast<int>(state.range(0));
  auto lv = [&](const char* p) {
    std::vector<std::string> l;
    for (int i = 0; i < levels; ++i) l.push_back(p + std::to_string(i));
    return l;
  };
  const auto d = full_factorial({{"alg", Category::Controllable, lv("a")},
                                 {"dim", Category::Observable, lv("d")},
                                 {"seed", Category::Noise, lv("s")},
                                 {"y", Category::Response, {}}},
                                3);
  std::mt19937_64 rng(1);
  std::vector<RunRecord> runs;
  for (const auto& cell : d.cells)
    for (std::size_t r = 0; r < d.replicates; ++r)
      runs.push_back({cell, r, {{"y", std::uniform_real_distribution<double>(0, 1)(rng)}}, 0});
  for (auto _ : state)
    benchmark::DoNotOptimize(robust_select(d, runs, "y", Aggregation::WorstCase, Direction::Minimize));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * runs.size()));
}
BENCHMARK(BM_RobustSelect)->Arg(3)->Arg(8);

}  // namespace

#include "greybox/contopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "greybox/csv.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::contopt {

void BenchConfig::validate() const {
  if (functions.empty() || starts.empty() || rules.empty())
    throw Error(ErrorKind::InvalidConfig, "functions, starts and rules must all be non-empty");
  if (replicates == 0) throw Error(ErrorKind::InvalidConfig, "replicates must be >= 1");
  if (!(perturbation >= 0.0) || !(target_offset > 0.0))
    throw Error(ErrorKind::InvalidConfig, "perturbation must be >= 0 and target_offset > 0");
  std::set<std::string> names;
  for (const auto& f : functions) {
    if (!names.insert(f.name).second)
      throw Error(ErrorKind::InvalidConfig, "function '" + f.name + "' is listed twice", {{"function", f.name}});
    for (const auto& s : starts)
      if (s.size() != f.dimension)
        throw Error(ErrorKind::InvalidConfig,
                    "start " + start_label(s) + " does not match the dimension of '" + f.name + "'",
                    {{"function", f.name}, {"dimension", f.dimension}});
  }
  nm.validate();
}

std::string start_label(const Vector& x) {
  std::string s;
  for (std::size_t j = 0; j < x.size(); ++j) s += (j ? ";" : "") + csv::format_number(x[j]);
  return s;
}

namespace {

struct Cell {
  std::size_t function;
  std::size_t start;
  std::size_t rule;
  std::size_t replicate;
};

std::string start_label_base(const std::string& label) { return label.substr(0, label.find('@')); }

double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits, identical on every platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

BenchRow run_cell(const BenchConfig& cfg, const Cell& c) {
  const auto& fn = cfg.functions[c.function];
  Vector x1 = cfg.starts[c.start];
  std::string label = start_label(x1);
  std::uint64_t cell_seed = 0;
  if (c.replicate > 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(c.start), static_cast<std::uint32_t>(c.replicate)};
    std::mt19937_64 rng(seq);
    cell_seed = rng();
    for (double& v : x1) v += cfg.perturbation * (2.0 * unit_uniform(rng) - 1.0);
    label += "@r" + std::to_string(c.replicate);
  }
  const Simplex s0 = build_simplex(cfg.rules[c.rule], x1);
  const Objective f = fn.objective();
  const NMResult res = nelder_mead(f, s0, cfg.nm);

  BenchRow row;
  row.function = fn.name;
  row.start = std::move(label);
  row.rule = cfg.rules[c.rule].label();
  row.replicate = c.replicate;
  row.seed = cell_seed;
  row.init = simplex_quality(s0);
  row.evals_to_target = res.evals_to_reach(fn.optimum_value + cfg.target_offset);
  row.best_f = res.best_f;
  row.evals_used = res.evals_used;
  row.termination = res.termination;
  return row;
}

}  // namespace

BenchTable benchmark_init_rules(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  for (std::size_t f = 0; f < cfg.functions.size(); ++f)
    for (std::size_t s = 0; s < cfg.starts.size(); ++s)
      for (std::size_t r = 0; r < cfg.rules.size(); ++r)
        for (std::size_t k = 0; k < cfg.replicates; ++k) cells.push_back({f, s, r, k});

  std::vector<BenchRow> rows(cells.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(cfg, cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = run_cell(cfg, cells[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.function, a.start, a.rule) < std::tie(b.function, b.start, b.rule);
  });
  return {std::move(rows)};
}

std::string bench_to_csv(const BenchTable& table) {
  std::string out = csv::format_row(
      {"function", "start", "rule", "init_diameter", "edge_ratio", "evals_to_target", "best_f", "termination"});
  for (const auto& r : table.rows) {
    out += csv::format_row({r.function, r.start, r.rule, csv::format_number(r.init.diameter),
                            csv::format_number(r.init.edge_ratio),
                            r.evals_to_target ? std::to_string(*r.evals_to_target) : "NA",
                            csv::format_number(r.best_f), std::string(to_string(r.termination))});
  }
  return out;
}

std::string bench_to_markdown(const BenchTable& table, const BenchConfig& cfg) {
  std::ostringstream os;
  os << "| function | start | rule | init diameter | edge ratio | degenerate | evals to target | best f | "
        "termination |\n|---|---|---|---:|---:|---|---:|---:|---|\n";
  for (const auto& r : table.rows) {
    os << "| " << r.function << " | " << r.start << " | " << r.rule << " | "
       << csv::format_number(r.init.diameter) << " | " << csv::format_number(r.init.edge_ratio) << " | "
       << (r.init.degenerate ? "yes" : "no") << " | "
       << (r.evals_to_target ? std::to_string(*r.evals_to_target) : "not reached") << " | "
       << csv::format_number(r.best_f) << " | " << to_string(r.termination) << " |\n";
  }
  os << "\nBudget " << cfg.nm.max_evals << " evaluations; target: best f below optimum + "
     << csv::format_number(cfg.target_offset) << "; replicates: " << cfg.replicates << ".\n";
  return os.str();
}

BenchConfig parse_bench_config(std::string_view document) {
  using json_util::ObjectReader;
  const auto doc = json_util::parse_document(document);
  ObjectReader r(doc, "");
  BenchConfig cfg;

  auto vector_of = [](const nlohmann::json& v, const std::string& path) {
    Vector out;
    const auto& arr = json_util::as_array(v, path);
    for (std::size_t i = 0; i < arr.size(); ++i)
      out.push_back(json_util::as_number(arr[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };

  const auto& functions = r.array("functions");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    ObjectReader fr(functions[i], "functions[" + std::to_string(i) + "]");
    auto name = fr.string("name");
    Vector center;
    if (const auto* c = fr.optional("center")) center = vector_of(*c, fr.child_path("center"));
    std::size_t n = center.size();
    if (fr.has("dimension")) n = static_cast<std::size_t>(fr.integer("dimension"));
    fr.finish();
    cfg.functions.push_back(make_test_function(name, n, center));
  }
  const auto& starts = r.array("starts");
  for (std::size_t i = 0; i < starts.size(); ++i)
    cfg.starts.push_back(vector_of(starts[i], "starts[" + std::to_string(i) + "]"));
  const auto& rules = r.array("rules");
  for (std::size_t i = 0; i < rules.size(); ++i)
    cfg.rules.push_back(InitRule::parse(json_util::as_string(rules[i], "rules[" + std::to_string(i) + "]")));

  if (const auto* nm = r.optional("nm")) {
    ObjectReader nr(*nm, "nm");
    if (nr.has("max_evals")) {
      auto m = nr.integer("max_evals");
      if (m < 0) json_util::fail("nm.max_evals", "must be >= 0");
      cfg.nm.max_evals = static_cast<std::uint64_t>(m);
    }
    if (nr.has("f_tol")) cfg.nm.f_tol = nr.number("f_tol");
    if (nr.has("x_tol")) cfg.nm.x_tol = nr.number("x_tol");
    if (nr.has("alpha")) cfg.nm.coefficients.reflection = nr.number("alpha");
    if (nr.has("gamma")) cfg.nm.coefficients.expansion = nr.number("gamma");
    if (nr.has("rho")) cfg.nm.coefficients.contraction = nr.number("rho");
    if (nr.has("sigma")) cfg.nm.coefficients.shrink = nr.number("sigma");
    nr.finish();
  }
  if (r.has("replicates")) {
    auto k = r.integer("replicates");
    if (k < 1) json_util::fail("replicates", "must be >= 1");
    cfg.replicates = static_cast<std::size_t>(k);
  }
  if (r.has("seed")) cfg.seed = static_cast<std::uint64_t>(r.integer("seed"));
  if (r.has("perturbation")) cfg.perturbation = r.number("perturbation");
  if (r.has("target_offset")) cfg.target_offset = r.number("target_offset");
  if (r.has("threads")) cfg.threads = static_cast<unsigned>(std::max<std::int64_t>(1, r.integer("threads")));
  r.finish();
  cfg.validate();
  return cfg;
}

std::pair<experiment::Design, std::vector<experiment::RunRecord>> bench_experiment(const BenchTable& table,
                                                                                 const BenchConfig& cfg) {
  using namespace experiment;
  std::vector<std::string> functions, rules, starts;
  auto add = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& f : cfg.functions) add(functions, f.name);
  for (const auto& r : cfg.rules) add(rules, r.label());
  for (const auto& s : cfg.starts) add(starts, start_label(s));

  Design design = full_factorial({{"function", Category::Observable, functions},
                                  {"rule", Category::Controllable, rules},
                                  {"start", Category::Noise, starts},
                                  {"evals_to_target", Category::Response, {}},
                                  {"best_f", Category::Response, {}}},
                                 cfg.replicates);
  std::vector<RunRecord> runs;
  for (const auto& row : table.rows) {
    RunRecord run;
    run.cell = {{"function", row.function}, {"rule", row.rule}, {"start", start_label_base(row.start)}};
    run.replicate = row.replicate;
    run.seed = static_cast<std::int64_t>(row.seed);
    run.responses["evals_to_target"] =
        static_cast<double>(row.evals_to_target ? *row.evals_to_target : cfg.nm.max_evals + 1);
    run.responses["best_f"] = row.best_f;
    runs.push_back(std::move(run));
  }
  return {std::move(design), std::move(runs)};
}

}  // namespace greybox::contopt

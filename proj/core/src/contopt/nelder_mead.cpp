#include "greybox/contopt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "greybox/errors.hpp"

namespace greybox::contopt {

void NMConfig::validate() const {
  if (max_evals == 0) throw Error(ErrorKind::BudgetZero, "max_evals must be at least 1");
  const auto& c = coefficients;
  if (!(f_tol >= 0.0) || !(x_tol >= 0.0))
    throw Error(ErrorKind::InvalidConfig, "tolerances must be >= 0", {{"f_tol", f_tol}, {"x_tol", x_tol}});
  if (!(c.reflection > 0.0) || !(c.expansion > 1.0) || !(c.contraction > 0.0 && c.contraction < 1.0) ||
      !(c.shrink > 0.0 && c.shrink < 1.0))
    throw Error(ErrorKind::InvalidConfig, "coefficients need alpha > 0, gamma > 1, 0 < rho < 1, 0 < sigma < 1",
                {{"alpha", c.reflection}, {"gamma", c.expansion}, {"rho", c.contraction}, {"sigma", c.shrink}});
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::FTol: return "f_tol";
    case Termination::XTol: return "x_tol";
    case Termination::Budget: return "budget";
    case Termination::DegenerateStall: return "degenerate_stall";
  }
  return "";
}

std::optional<std::uint64_t> NMResult::evals_to_reach(double target) const {
  for (const auto& h : history)
    if (h.best_f < target) return h.eval_index;
  return std::nullopt;
}

namespace {

class Run {
 public:
  Run(const Objective& f, const NMConfig& cfg) : f_(f), cfg_(cfg) {}

  /// nullopt when the budget is exhausted.
  std::optional<double> eval(const Vector& x) {
    if (result.evals_used >= cfg_.max_evals) return std::nullopt;
    const double fx = f_(x);
    ++result.evals_used;
    if (result.history.empty() || fx < result.best_f) {
      result.best_f = fx;
      result.best_x = x;
    }
    result.history.push_back({result.evals_used, result.best_f});
    return fx;
  }

  NMResult result;

 private:
  const Objective& f_;
  const NMConfig& cfg_;
};

// Trial points live on a dyadic lattice anchored at the starting point. The
// step is a power of two tied to the initial simplex size, so x0 + y is exact
// for moderate |x| and a translation by a lattice vector changes no rounding.
constexpr int kLatticeBits = 46;

class Lattice {
 public:
  explicit Lattice(double scale) {
    const int e = scale > 0.0 && std::isfinite(scale) ? std::ilogb(scale) : 0;
    step_ = std::ldexp(1.0, e - kLatticeBits);
  }
  double snap(double v) const {
    const double k = v / step_;
    if (!(std::fabs(k) < 0x1p53)) return v;
    return std::nearbyint(k) * step_;
  }

 private:
  double step_ = 1.0;
};

// along(a, b, t) = a + t * (b - a), snapped to the lattice
Vector along(const Vector& a, const Vector& b, double t, const Lattice& lat) {
  Vector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = lat.snap(a[j] + t * (b[j] - a[j]));
  return out;
}

}  // namespace

NMResult nelder_mead(const Objective& f, const Simplex& s0, const NMConfig& cfg) {
  cfg.validate();
  const std::size_t n = f.dimension();
  if (s0.points.size() != n + 1 ||
      std::any_of(s0.points.begin(), s0.points.end(), [&](const Vector& p) { return p.size() != n; }))
    throw Error(ErrorKind::InvalidArgument, "simplex must have n+1 points of dimension n",
                {{"n", n}, {"points", s0.points.size()}});

  const auto& co = cfg.coefficients;
  Run run(f, cfg);
  auto& res = run.result;

  // The search runs on offsets y = x - x0; the objective sees x0 + y.
  const Vector& x0 = s0.points.front();
  std::vector<Vector> x(n + 1, Vector(n));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j < n; ++j) x[i][j] = s0.points[i][j] - x0[j];
  const Lattice lat(simplex_diameter(x));
  auto absolute = [&](const Vector& y) {
    Vector p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = x0[j] + y[j];
    return p;
  };
  auto eval = [&](const Vector& y) { return run.eval(absolute(y)); };

  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    auto v = run.eval(s0.points[i]);
    if (!v) {
      res.termination = Termination::Budget;
      return res;
    }
    fx[i] = *v;
  }

  std::vector<std::size_t> order(n + 1);
  std::uint64_t stalled = 0;
  const std::uint64_t stall_limit = kStallIterationsPerDimension * n;

  for (;;) {
    // Sort vertices best to worst. Stable sorting keeps older vertices ahead
    // of a new vertex with an equal value.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    {
      std::vector<Vector> xs(n + 1);
      std::vector<double> fs(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        xs[i] = std::move(x[order[i]]);
        fs[i] = fx[order[i]];
      }
      x = std::move(xs);
      fx = std::move(fs);
    }

    const double spread = fx[n] - fx[0];
    if (spread == 0.0 && simplex_volume(x) == 0.0) {
      if (++stalled >= stall_limit) {
        res.termination = Termination::DegenerateStall;
        return res;
      }
    } else {
      stalled = 0;
      if (spread <= cfg.f_tol) {
        res.termination = Termination::FTol;
        return res;
      }
      if (simplex_diameter(x) <= cfg.x_tol) {
        res.termination = Termination::XTol;
        return res;
      }
    }

    ++res.iterations;
    Vector centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += x[i][j];
    for (double& c : centroid) c = lat.snap(c / static_cast<double>(n));

    auto budget_out = [&] {
      res.termination = Termination::Budget;
      return res;
    };

    const Vector xr = along(centroid, x[n], -co.reflection, lat);
    const auto fr = eval(xr);
    if (!fr) return budget_out();

    if (*fr < fx[0]) {
      const Vector xe = along(centroid, x[n], -co.reflection * co.expansion, lat);
      const auto fe = eval(xe);
      if (!fe) return budget_out();
      if (*fe < *fr) {
        x[n] = xe;
        fx[n] = *fe;
      } else {
        x[n] = xr;
        fx[n] = *fr;
      }
      continue;
    }
    if (*fr < fx[n - 1]) {
      x[n] = xr;
      fx[n] = *fr;
      continue;
    }
    if (*fr < fx[n]) {
      const Vector xc = along(centroid, xr, co.contraction, lat);
      const auto fc = eval(xc);
      if (!fc) return budget_out();
      if (*fc <= *fr) {
        x[n] = xc;
        fx[n] = *fc;
        continue;
      }
    } else {
      const Vector xcc = along(centroid, x[n], co.contraction, lat);
      const auto fcc = eval(xcc);
      if (!fcc) return budget_out();
      if (*fcc < fx[n]) {
        x[n] = xcc;
        fx[n] = *fcc;
        continue;
      }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      x[i] = along(x[0], x[i], co.shrink, lat);
      const auto fi = eval(x[i]);
      if (!fi) return budget_out();
      fx[i] = *fi;
    }
  }
}

}  // namespace greybox::contopt

#include "finsler/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"

namespace finsler::catalog {

namespace {

using core::ChartPoint;
using core::JetVars;
using core::ScalarField;
using jets::Jet;

constexpr const char* kNames[] = {
    "euclidean",
    "klein",
    "randers_pf",
    "deformed_randers",
    "funk",
    "generalized_funk",
    "square_pf",
    "conformal_pf",
    "riemann_counterexample_2d",
    "riemann_counterexample_3d",
    "randers_nonclosed",
};

Jet dot(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  Jet s = a[0] * b[0];
  for (size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Jet dot(const std::vector<double>& c, const std::vector<Jet>& v) {
  Jet s = v[0] * c[0];
  for (size_t i = 1; i < v.size(); ++i) s += v[i] * c[i];
  return s;
}

std::vector<double> resized(std::vector<double> v, int n) {
  v.resize(size_t(n), 0.0);
  return v;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Shared Randers-type building blocks of eq-(Finsler:m)-style metrics:
// A = 1 - 4c^2|x|^2, s = sqrt(|y|^2 - 4c^2(|x|^2|y|^2 - <x,y>^2)).
struct RandersParts {
  Jet A, s;
};

RandersParts randers_parts(double c, const JetVars& vars) {
  const Jet x2 = dot(vars.x, vars.x);
  const Jet y2 = dot(vars.y, vars.y);
  const Jet xy = dot(vars.x, vars.y);
  const double c4 = 4.0 * c * c;
  return {1.0 - c4 * x2, sqrt(y2 - c4 * (x2 * y2 - xy * xy))};
}

}  // namespace

const char* family_name(Family f) { return kNames[int(f)]; }

std::optional<Family> family_from_name(const std::string& name) {
  for (size_t i = 0; i < std::size(kNames); ++i)
    if (name == kNames[i]) return Family(i);
  return {};
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> fams = [] {
    std::vector<Family> v;
    for (size_t i = 0; i < std::size(kNames); ++i) v.push_back(Family(i));
    return v;
  }();
  return fams;
}

double MetricSpec::scalar(const std::string& key, double def) const {
  auto it = params.find(key);
  if (it == params.end()) return def;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw InvalidParams("parameter '" + key + "' must be a scalar");
}

double MetricSpec::scalar(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end())
    throw InvalidParams("missing required parameter '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw InvalidParams("parameter '" + key + "' must be a scalar");
}

std::vector<double> MetricSpec::vec(const std::string& key,
                                    std::vector<double> def) const {
  auto it = params.find(key);
  if (it == params.end()) return resized(std::move(def), n);
  if (const auto* v = std::get_if<std::vector<double>>(&it->second))
    return resized(*v, n);
  if (const double* d = std::get_if<double>(&it->second))
    return resized({*d}, n);
  throw InvalidParams("parameter '" + key + "' must be a vector");
}

namespace {

void validate(const MetricSpec& spec) {
  if (spec.n < 2 || spec.n > 4)
    throw InvalidParams("dimension n must satisfy 2 <= n <= 4");
  switch (spec.family) {
    case Family::randers_pf:
      if (spec.scalar("c", 0.3) == 0.0)
        throw InvalidParams("randers_pf requires c != 0");
      break;
    case Family::deformed_randers:
      if (spec.scalar("nu", -0.5) == 0.0)
        throw InvalidParams("deformed_randers requires nu != 0");
      break;
    case Family::generalized_funk:
      if (norm(spec.vec("e", {0.1})) >= 1.0)
        throw InvalidParams("generalized_funk requires |e| < 1");
      break;
    case Family::square_pf:
      if (spec.scalar("c", 0.5) == 0.0)
        throw InvalidParams("square_pf requires c != 0");
      if (!(spec.scalar("eta", 1.0) > 0.0))
        throw InvalidParams("square_pf requires eta > 0");
      break;
    case Family::conformal_pf:
      if (spec.scalar("c", 0.5) == 0.0)
        throw InvalidParams("conformal_pf requires c != 0");
      if (!(spec.scalar("eta", 1.0) > 0.0))
        throw InvalidParams("conformal_pf requires eta > 0");
      break;
    case Family::riemann_counterexample_2d:
      if (spec.n != 2)
        throw InvalidParams("riemann_counterexample_2d requires n = 2");
      break;
    case Family::riemann_counterexample_3d:
      if (spec.n != 3)
        throw InvalidParams("riemann_counterexample_3d requires n = 3");
      break;
    default:
      break;
  }
}

}  // namespace

core::ScalarField build_metric(const MetricSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case Family::euclidean:
      return ScalarField(
          [](const JetVars& vars) { return sqrt(dot(vars.y, vars.y)); }, 1);

    case Family::klein: {
      const double mu = spec.scalar("mu", -1.0);
      return ScalarField(
          [mu](const JetVars& vars) {
            const Jet x2 = dot(vars.x, vars.x);
            const Jet y2 = dot(vars.y, vars.y);
            const Jet xy = dot(vars.x, vars.y);
            return sqrt(y2 + mu * (x2 * y2 - xy * xy)) / (1.0 + mu * x2);
          },
          1);
    }

    case Family::randers_pf: {
      const double c = spec.scalar("c", 0.3);
      return ScalarField(
          [c](const JetVars& vars) {
            const auto rp = randers_parts(c, vars);
            return (rp.s + 2.0 * c * dot(vars.x, vars.y)) / rp.A;
          },
          1);
    }

    case Family::deformed_randers: {
      const double nu = spec.scalar("nu", -0.5);
      const double f = spec.scalar("f", 1.0);
      const auto e = spec.vec("e", {0.1});
      return ScalarField(
          [nu, f, e](const JetVars& vars) {
            const auto rp = randers_parts(nu, vars);
            const Jet xy = dot(vars.x, vars.y);
            return (rp.s - 2.0 * nu * xy) / rp.A +
                   dot(e, vars.y) / (4.0 * nu * nu * (dot(e, vars.x) + f));
          },
          1);
    }

    case Family::funk:
      return ScalarField(
          [](const JetVars& vars) {
            const Jet x2 = dot(vars.x, vars.x);
            const Jet y2 = dot(vars.y, vars.y);
            const Jet xy = dot(vars.x, vars.y);
            return (sqrt(y2 - (x2 * y2 - xy * xy)) + xy) / (1.0 - x2);
          },
          1);

    case Family::generalized_funk: {
      const auto e = spec.vec("e", {0.1});
      return ScalarField(
          [e](const JetVars& vars) {
            const Jet x2 = dot(vars.x, vars.x);
            const Jet y2 = dot(vars.y, vars.y);
            const Jet xy = dot(vars.x, vars.y);
            return (sqrt(y2 - (x2 * y2 - xy * xy)) + xy) / (1.0 - x2) +
                   dot(e, vars.y) / (1.0 + dot(e, vars.x));
          },
          1);
    }

    case Family::square_pf: {
      const double c = spec.scalar("c", 0.5);
      const double eta = spec.scalar("eta", 1.0);
      return ScalarField(
          [c, eta](const JetVars& vars) {
            const auto rp = randers_parts(c, vars);
            const Jet num = rp.s + 2.0 * c * dot(vars.x, vars.y);
            return eta * num * num / (rp.A * rp.A * rp.s);
          },
          1);
    }

    case Family::conformal_pf: {
      const double c = spec.scalar("c", 0.5);
      const double eta = spec.scalar("eta", 1.0);
      const double e = spec.scalar("e", 1.0);
      const auto v = spec.vec("v", {0.05});
      return ScalarField(
          [c, eta, e, v](const JetVars& vars) {
            const auto rp = randers_parts(c, vars);
            const Jet num = rp.s + 2.0 * c * dot(vars.x, vars.y);
            const Jet Fsquare = eta * num * num / (rp.A * rp.A * rp.s);
            const Jet Frand = num / rp.A;
            const Jet factor =
                2.0 * c * dot(v, vars.x) + e + dot(v, vars.y) / Frand;
            return Fsquare * factor;
          },
          1);
    }

    case Family::riemann_counterexample_2d:
      return ScalarField(
          [](const JetVars& vars) {
            return sqrt(vars.y[0] * vars.y[0] +
                        exp(vars.x[0] * vars.x[0]) * vars.y[1] * vars.y[1]);
          },
          1);

    case Family::riemann_counterexample_3d:
      return ScalarField(
          [](const JetVars& vars) {
            return sqrt(vars.y[0] * vars.y[0] + vars.y[1] * vars.y[1] +
                        exp(vars.x[0] * vars.x[0]) * vars.y[2] * vars.y[2]);
          },
          1);

    case Family::randers_nonclosed: {
      const double eps = spec.scalar("epsilon", 0.1);
      return ScalarField(
          [eps](const JetVars& vars) {
            return sqrt(dot(vars.y, vars.y)) + eps * vars.x[0] * vars.y[1];
          },
          1);
    }
  }
  throw InvalidParams("unknown metric family");
}

core::ScalarField b_form(const MetricSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case Family::randers_pf: {
      const double c = spec.scalar("c", 0.3);
      return ScalarField(
          [c](const JetVars& vars) {
            const Jet x2 = dot(vars.x, vars.x);
            return 2.0 * c * dot(vars.x, vars.y) / (1.0 - 4.0 * c * c * x2);
          },
          1);
    }
    case Family::randers_nonclosed: {
      const double eps = spec.scalar("epsilon", 0.1);
      return ScalarField(
          [eps](const JetVars& vars) { return eps * vars.x[0] * vars.y[1]; },
          1);
    }
    case Family::deformed_randers:
      return bbar_field(spec.scalar("nu", -0.5), spec.vec("e", {0.1}),
                        spec.scalar("f", 1.0), spec.n);
    case Family::generalized_funk:
      return bbar_field(-0.5, spec.vec("e", {0.1}), 1.0, spec.n);
    default:
      throw InvalidParams(std::string("no b-form for family ") +
                          family_name(spec.family));
  }
}

MetricSpec base_spec(const MetricSpec& spec) {
  switch (spec.family) {
    case Family::deformed_randers:
      return MetricSpec(Family::randers_pf, spec.n,
                        {{"c", -spec.scalar("nu", -0.5)}});
    case Family::generalized_funk:
      return MetricSpec(Family::funk, spec.n);
    case Family::square_pf:
    case Family::conformal_pf:
      return MetricSpec(Family::randers_pf, spec.n,
                        {{"c", spec.scalar("c", 0.5)}});
    default:
      throw InvalidParams(std::string("no base metric for family ") +
                          family_name(spec.family));
  }
}

core::ScalarField bbar_field(double nu, std::vector<double> e, double f,
                             int n) {
  if (nu == 0.0) throw InvalidParams("bbar requires nu != 0");
  e = resized(std::move(e), n);
  return ScalarField(
      [nu, e, f](const JetVars& vars) {
        return dot(e, vars.y) / (4.0 * nu * nu * (dot(e, vars.x) + f));
      },
      1);
}

core::ScalarField randers_add(const core::ScalarField& F,
                              const core::ScalarField& b) {
  return ScalarField(
      [F, b](const JetVars& vars) { return F.eval(vars) + b.eval(vars); }, 1,
      std::max(F.jet_deficit(), b.jet_deficit()));
}

core::ScalarField square_deform(const core::ScalarField& F,
                                const core::ScalarField& a,
                                const core::ScalarField& fconf) {
  const int deficit = std::max({F.jet_deficit(), a.jet_deficit(),
                                fconf.jet_deficit()});
  return ScalarField(
      [F, a, fconf](const JetVars& vars) {
        const Jet Fj = F.eval(vars);
        return fconf.eval(vars) * Fj * Fj / a.eval(vars);
      },
      1, deficit);
}

core::ScalarField conformal_mult(const core::ScalarField& Fbar,
                                 const core::ScalarField& g,
                                 const core::ScalarField& f,
                                 const core::ScalarField& F) {
  const int deficit = std::max({Fbar.jet_deficit(), g.jet_deficit(),
                                f.jet_deficit(), F.jet_deficit()});
  return ScalarField(
      [Fbar, g, f, F](const JetVars& vars) {
        const Jet fb = Fbar.eval(vars);
        return g.eval(vars) * fb + f.eval(vars) / F.eval(vars) * fb;
      },
      1, deficit);
}

double domain_radius(const MetricSpec& spec) {
  switch (spec.family) {
    case Family::klein: {
      const double mu = spec.scalar("mu", -1.0);
      return mu < 0.0 ? 1.0 / std::sqrt(-mu) : 1.0;
    }
    case Family::randers_pf:
      return 1.0 / (2.0 * std::abs(spec.scalar("c", 0.3)));
    case Family::deformed_randers:
      return 1.0 / (2.0 * std::abs(spec.scalar("nu", -0.5)));
    case Family::square_pf:
    case Family::conformal_pf:
      return 1.0 / (2.0 * std::abs(spec.scalar("c", 0.5)));
    default:
      return 1.0;  // funk family lives on the unit ball; others sample there
  }
}

bool in_domain(const MetricSpec& spec, const core::ChartPoint& p) {
  if (p.n() != spec.n) return false;
  const double r = norm(p.x);
  if (r >= domain_radius(spec)) return false;
  switch (spec.family) {
    case Family::deformed_randers: {
      const double nu = spec.scalar("nu", -0.5);
      const double f = spec.scalar("f", 1.0);
      const auto e = spec.vec("e", {0.1});
      double ex = f;
      for (int i = 0; i < spec.n; ++i) ex += e[i] * p.x[i];
      if (!(-2.0 * nu * ex > 0.0)) return false;
      break;
    }
    case Family::generalized_funk: {
      const auto e = spec.vec("e", {0.1});
      double ex = 1.0;
      for (int i = 0; i < spec.n; ++i) ex += e[i] * p.x[i];
      if (!(ex > 0.0)) return false;
      break;
    }
    default:
      break;
  }
  return true;
}

std::function<bool(const core::ChartPoint&)> domain_predicate(
    const MetricSpec& spec) {
  MetricSpec copy = spec;
  return [copy](const core::ChartPoint& p) { return in_domain(copy, p); };
}

std::optional<double> expected_kappa(const MetricSpec& spec) {
  switch (spec.family) {
    case Family::euclidean:
      return 0.0;
    case Family::klein:
      return spec.scalar("mu", -1.0);
    case Family::randers_pf: {
      const double c = spec.scalar("c", 0.3);
      return -c * c;
    }
    case Family::deformed_randers: {
      const double nu = spec.scalar("nu", -0.5);
      return -nu * nu;
    }
    case Family::funk:
    case Family::generalized_funk:
      return -0.25;
    case Family::square_pf:
    case Family::conformal_pf:
      return 0.0;
    default:
      return {};
  }
}

namespace {

// SplitMix64: deterministic, stdlib-independent stream per (seed, index).
struct SplitMix64 {
  uint64_t s;
  uint64_t next() {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

bool positive_definite(const Matrix& g) {
  // unpivoted Cholesky; fails on any non-positive pivot
  const int n = g.rows;
  Matrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 1e-12)) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace

DomainSampler::DomainSampler(MetricSpec spec, uint64_t seed,
                             double radius_fraction)
    : spec_(std::move(spec)),
      F_(build_metric(spec_)),
      seed_(seed),
      radius_fraction_(radius_fraction) {
  if (!(radius_fraction_ > 0.0 && radius_fraction_ < 1.0))
    throw InvalidParams("radius_fraction must lie in (0,1)");
}

core::ChartPoint DomainSampler::sample_one(int index) const {
  const int n = spec_.n;
  const double radius = radius_fraction_ * domain_radius(spec_);
  SplitMix64 rng{seed_ + 0x9E3779B97F4A7C15ULL * (uint64_t(index) + 1)};
  constexpr int kMaxAttempts = 200;  // acceptance below ~1% signals bad params
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> x(n), y(n);
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = radius * (2.0 * rng.uniform() - 1.0);
      r2 += x[i] * x[i];
    }
    if (r2 > radius * radius) continue;
    double ynorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = 2.0 * rng.uniform() - 1.0;
      ynorm2 += y[i] * y[i];
    }
    if (ynorm2 < 0.01 || ynorm2 > 1.0) continue;
    const double ynorm = std::sqrt(ynorm2);
    for (int i = 0; i < n; ++i) y[i] /= ynorm;

    core::ChartPoint p(std::move(x), std::move(y));
    if (!in_domain(spec_, p)) continue;
    double Fv;
    try {
      Fv = F_.value(p);
    } catch (const std::exception&) {
      continue;
    }
    if (!std::isfinite(Fv) || !(Fv > 0.0)) continue;
    try {
      if (!positive_definite(core::metric_tensor(F_, p))) continue;
    } catch (const std::exception&) {
      continue;
    }
    return p;
  }
  throw RejectionOverflow("DomainSampler: acceptance rate below threshold for " +
                          std::string(family_name(spec_.family)));
}

std::vector<core::ChartPoint> DomainSampler::sample(int count) const {
  if (count < 1) throw InvalidParams("sample count must be >= 1");
  std::vector<core::ChartPoint> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(sample_one(i));
  return pts;
}

void assert_positive_on_samples(const core::ScalarField& F,
                                const DomainSampler& sampler, int count) {
  for (int i = 0; i < count; ++i) {
    const auto p = sampler.sample_one(i);
    if (!(F.value(p) > 0.0))
      throw PositivityViolated("field is non-positive at a sampled point");
  }
}

}  // namespace finsler::catalog

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "finsler/chart.hpp"

namespace finsler::catalog {

enum class Family {
  euclidean,
  klein,
  randers_pf,
  deformed_randers,
  funk,
  generalized_funk,
  square_pf,
  conformal_pf,
  riemann_counterexample_2d,
  riemann_counterexample_3d,
  randers_nonclosed,
};

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);
const std::vector<Family>& all_families();

using ParamValue = std::variant<double, std::vector<double>>;

/// Catalog identifier plus parameter record defining one Finsler function
/// and its validity domain. Parameter names are family-scoped; unset
/// parameters take the documented defaults (e = (0.1, 0, ...), f = 1,
/// v = (0.05, 0, ...), conformal e = 1, epsilon = 0.1).
struct MetricSpec {
  Family family = Family::euclidean;
  int n = 2;
  std::map<std::string, ParamValue> params;

  MetricSpec() = default;
  MetricSpec(Family f, int dim, std::map<std::string, ParamValue> p = {})
      : family(f), n(dim), params(std::move(p)) {}

  double scalar(const std::string& key, double def) const;
  double scalar(const std::string& key) const;  // throws InvalidParams if absent
  std::vector<double> vec(const std::string& key,
                          std::vector<double> def) const;
};

/// Builds the evaluator for the spec's closed-form Finsler function.
/// Throws InvalidParams naming the violated constraint.
core::ScalarField build_metric(const MetricSpec& spec);

/// The linear b-form of Randers-type families (randers_pf, randers_nonclosed,
/// deformed_randers / generalized_funk's bbar).
core::ScalarField b_form(const MetricSpec& spec);

/// The underlying projectively flat Randers metric a+b that deformed_randers,
/// square_pf and conformal_pf are built from.
MetricSpec base_spec(const MetricSpec& spec);

/// bbar(x, y) = <e,y> / (4 nu^2 (<e,x> + f)).
core::ScalarField bbar_field(double nu, std::vector<double> e, double f, int n);

// ---- deformation combinators -----------------------------------------------

/// F -> F + b (Randers change).
core::ScalarField randers_add(const core::ScalarField& F,
                              const core::ScalarField& b);

/// F -> fconf(x) * F^2 / a (square-type change).
core::ScalarField square_deform(const core::ScalarField& F,
                                const core::ScalarField& a,
                                const core::ScalarField& fconf);

/// Fbar -> g(x) Fbar + (f/F) Fbar (conformal-type change by a 0-homogeneous
/// factor).
core::ScalarField conformal_mult(const core::ScalarField& Fbar,
                                 const core::ScalarField& g,
                                 const core::ScalarField& f,
                                 const core::ScalarField& F);

// ---- domains & sampling ----------------------------------------------------

/// Radius of the x-ball on which the family is defined (1 for all-plane).
double domain_radius(const MetricSpec& spec);

/// Algebraic domain constraints at a point (ball membership, denominator and
/// square-root positivity). Does not check g positive definite.
bool in_domain(const MetricSpec& spec, const core::ChartPoint& p);

std::function<bool(const core::ChartPoint&)> domain_predicate(
    const MetricSpec& spec);

/// Paper default flag curvature of the family, when one is asserted
/// (-c^2, -nu^2, -1/4, 0, mu); empty for the counterexample families.
std::optional<double> expected_kappa(const MetricSpec& spec);

/// Deterministic in-domain sampler: x uniform in the ball of radius
/// radius_fraction * domain_radius, y uniform on the unit sphere, with
/// rejection on domain constraints, F > 0 and g positive definite.
/// Point `index` depends only on (seed, index).
class DomainSampler {
 public:
  DomainSampler(MetricSpec spec, uint64_t seed, double radius_fraction = 0.8);

  core::ChartPoint sample_one(int index) const;
  std::vector<core::ChartPoint> sample(int count) const;

  const MetricSpec& spec() const { return spec_; }
  uint64_t seed() const { return seed_; }
  double radius_fraction() const { return radius_fraction_; }

 private:
  MetricSpec spec_;
  core::ScalarField F_;
  uint64_t seed_;
  double radius_fraction_;
};

/// Throws PositivityViolated when F is non-positive at any sampled point.
void assert_positive_on_samples(const core::ScalarField& F,
                                const DomainSampler& sampler, int count);

}  // namespace finsler::catalog

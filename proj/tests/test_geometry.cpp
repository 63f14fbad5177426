#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/fd_oracle.hpp"
#include "finsler/geometry.hpp"
#include "finsler/metrics.hpp"

using namespace finsler;
using catalog::Family;
using catalog::MetricSpec;
using core::ChartPoint;
using core::JetVars;
using core::ScalarField;
using core::SprayCoeffs;

namespace {

ScalarField metric(Family f, int n,
                   std::map<std::string, catalog::ParamValue> params = {}) {
  return catalog::build_metric(MetricSpec(f, n, std::move(params)));
}

std::vector<ChartPoint> samples(const MetricSpec& spec, int count,
                                uint64_t seed = 11) {
  return catalog::DomainSampler(spec, seed).sample(count);
}

}  // namespace

TEST_CASE("metric tensor") {
  const auto eucl = metric(Family::euclidean, 2);
  const auto g = core::metric_tensor(eucl, ChartPoint({0.3, -0.1}, {0.8, 0.6}));
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(0.0));

  const auto klein = metric(Family::klein, 3, {{"mu", -1.0}});
  const auto gk =
      core::metric_tensor(klein, ChartPoint({0, 0, 0}, {0.3, -0.5, 0.2}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(gk(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));

  // Randers family versus second differences of F^2/2
  const auto rand = metric(Family::randers_pf, 2, {{"c", 0.5}});
  const ChartPoint p({0.3, 0.0}, {0.6, 0.8});
  const auto gr = core::metric_tensor(rand, p);
  auto half_L = [&](const ChartPoint& q) {
    const double F = rand.value(q);
    return 0.5 * F * F;
  };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      jets::MultiIndex m(4, 0);
      ++m[2 + i];
      ++m[2 + j];
      CHECK(gr(i, j) ==
            doctest::Approx(core::fd_oracle(half_L, p, m)).epsilon(1e-6));
    }
}

TEST_CASE("geodesic coefficients") {
  const auto eucl = metric(Family::euclidean, 2);
  for (double v : core::geodesic_coefficients(eucl, ChartPoint({0.4, 0.1}, {1.0, -0.3})))
    CHECK(std::abs(v) < 1e-12);

  const auto klein = metric(Family::klein, 2, {{"mu", -0.7}});
  for (double v : core::geodesic_coefficients(klein, ChartPoint({0, 0}, {0.3, 0.9})))
    CHECK(std::abs(v) < 1e-12);

  const auto funk = metric(Family::funk, 2);
  const auto G = core::geodesic_coefficients(funk, ChartPoint({0, 0}, {0, 1}));
  CHECK(G[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(G[1] == doctest::Approx(0.5));

  // G^i = P y^i with P = S0 F / (2F) for a projectively flat metric
  const MetricSpec fspec(Family::funk, 2);
  for (const auto& p : samples(fspec, 10)) {
    const double P = core::projective_factor_flat(funk, p);
    const auto g = core::geodesic_coefficients(funk, p);
    for (int i = 0; i < 2; ++i)
      CHECK(g[i] == doctest::Approx(P * p.y[i]).epsilon(1e-10));
  }
}

TEST_CASE("nonlinear connection") {
  const auto funk = metric(Family::funk, 2);
  const ChartPoint p({0.0, 0.0}, {0.0, 1.0});
  const auto N = core::nonlinear_connection(funk, p);
  // at x = 0: N^i_j = 1/2 (dF/dy^j y^i + F delta^i_j), F = |y|
  CHECK(N(0, 0) == doctest::Approx(0.5));
  CHECK(N(0, 1) == doctest::Approx(0.0));
  CHECK(N(1, 0) == doctest::Approx(0.0));
  CHECK(N(1, 1) == doctest::Approx(1.0));

  // Euler identity N^i_j y^j = 2 G^i across families
  for (auto fam : {Family::funk, Family::randers_pf, Family::square_pf,
                   Family::riemann_counterexample_2d}) {
    const MetricSpec spec(fam, 2);
    const auto F = catalog::build_metric(spec);
    for (const auto& q : samples(spec, 5)) {
      core::PointGeometry geo(F, q, 3);
      const auto Nq = geo.connection();
      const auto Gq = geo.spray();
      for (int i = 0; i < 2; ++i) {
        double c = 0.0;
        for (int j = 0; j < 2; ++j) c += Nq(i, j) * q.y[j];
        CHECK(std::abs(c - 2.0 * Gq[i]) < 1e-10 * (1.0 + std::abs(Gq[i])));
      }
    }
  }
}

TEST_CASE("jacobi endomorphism and ricci scalar") {
  const auto funk = metric(Family::funk, 2);
  const ChartPoint p({0.0, 0.0}, {0.0, 1.0});
  const auto Phi = core::jacobi_endomorphism(funk, p);
  CHECK(Phi(0, 0) == doctest::Approx(-0.25));
  CHECK(Phi(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(Phi(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(Phi(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(core::ricci_scalar(Phi, 2) == doctest::Approx(-0.25));

  // Phi^i_j y^j = 0 for every catalog family
  for (auto fam : {Family::funk, Family::randers_pf, Family::deformed_randers,
                   Family::square_pf, Family::conformal_pf,
                   Family::riemann_counterexample_2d}) {
    const MetricSpec spec(fam, 2);
    const auto F = catalog::build_metric(spec);
    for (const auto& q : samples(spec, 5)) {
      const auto Ph = core::jacobi_endomorphism(F, q);
      const double scale = 1e-9 * (1.0 + max_abs(Ph));
      for (int i = 0; i < 2; ++i) {
        double c = 0.0;
        for (int j = 0; j < 2; ++j) c += Ph(i, j) * q.y[j];
        CHECK(std::abs(c) < scale);
      }
    }
  }

  // rho/F^2 = -c^2 for the proportional-factor Randers family
  const MetricSpec rspec(Family::randers_pf, 2, {{"c", 0.3}});
  const auto rand = catalog::build_metric(rspec);
  for (const auto& q : samples(rspec, 10)) {
    const auto Ph = core::jacobi_endomorphism(rand, q);
    const double F = rand.value(q);
    CHECK(core::ricci_scalar(Ph, 2) / (F * F) == doctest::Approx(-0.09));
  }
}

TEST_CASE("curvature tensor") {
  // 2D Riemannian: R^i_jk = K (u_k delta^i_j - u_j delta^i_k) with
  // K = -(1 + x1^2) for g = diag(1, exp(x1^2)), u_j = 1/2 dF^2/dy^j.
  const MetricSpec spec(Family::riemann_counterexample_2d, 2);
  const auto F = catalog::build_metric(spec);
  const ChartPoint p({0.4, 0.2}, {0.6, 0.8});
  const double K = -(1.0 + p.x[0] * p.x[0]);
  const double g22 = std::exp(p.x[0] * p.x[0]);
  const double u[2] = {p.y[0], g22 * p.y[1]};

  const auto R = core::curvature_tensor(F, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double want =
            K * ((j == i ? u[k] : 0.0) - (k == i ? u[j] : 0.0));
        CHECK(R(i, j, k) == doctest::Approx(want).epsilon(1e-9));
      }

  // flag curvature of that metric is exactly K(x1)
  CHECK(core::flag_curvature(F, p) == doctest::Approx(K));

  // R^i_jk y^k = Phi^i_j on a Finsler family
  const MetricSpec fspec(Family::funk, 3);
  const auto funk = catalog::build_metric(fspec);
  for (const auto& q : samples(fspec, 5)) {
    core::PointGeometry geo(funk, q);
    const auto Rq = geo.curvature();
    const auto Phi = geo.jacobi();
    const double tol = 1e-9 * (1.0 + max_abs(Phi));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double c = 0.0;
        for (int k = 0; k < 3; ++k) c += Rq(i, j, k) * q.y[k];
        CHECK(std::abs(c - Phi(i, j)) < tol);
      }
  }
}

TEST_CASE("weyl tensors") {
  const auto eucl = metric(Family::euclidean, 2);
  const ChartPoint pe({0.1, 0.2}, {0.9, -0.4});
  CHECK(max_abs(core::weyl_w0(eucl, pe)) < 1e-12);
  CHECK(max_abs(core::weyl_w1(eucl, pe)) < 1e-12);

  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  for (const auto& q : samples(fspec, 10)) {
    core::PointGeometry geo(funk, q);
    const double scale = 1.0 + max_abs(geo.curvature());
    CHECK(max_abs(geo.w0()) < 1e-9 * scale);
    CHECK(max_abs(geo.w1()) < 1e-9 * scale);
  }

  // non-constant-curvature 3D Riemannian metric has a visible W1
  const MetricSpec cspec(Family::riemann_counterexample_3d, 3);
  const auto bad = catalog::build_metric(cspec);
  double w1max = 0.0;
  for (const auto& q : samples(cspec, 10))
    w1max = std::max(w1max, max_abs(core::weyl_w1(bad, q)));
  CHECK(w1max > 1e-3);
}

TEST_CASE("euler-lagrange form") {
  const auto flat = SprayCoeffs::flat();

  const ScalarField lin([](const JetVars& v) { return v.y[0] * 1.0; }, 1);
  for (double c : core::euler_lagrange(lin, flat, ChartPoint({0.7, -0.3}, {0.4, 1.2})))
    CHECK(std::abs(c) < 1e-13);

  const ScalarField xy([](const JetVars& v) { return v.x[0] * v.y[1]; }, 1);
  const auto el = core::euler_lagrange(xy, flat, ChartPoint({1.0, 0.0}, {1.0, 1.0}));
  CHECK(el[0] == doctest::Approx(-1.0));
  CHECK(el[1] == doctest::Approx(1.0));

  const auto funk = metric(Family::funk, 2);
  for (double c : core::euler_lagrange(funk, flat, ChartPoint({0.2, -0.3}, {0.5, 0.5})))
    CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("hamel residual") {
  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  for (const auto& q : samples(fspec, 10))
    CHECK(core::hamel_residual(funk, q) < 1e-10);

  const MetricSpec dspec(Family::deformed_randers, 2,
                         {{"nu", -0.5},
                          {"e", std::vector<double>{0.1, 0.0}},
                          {"f", 1.0}});
  const auto def = catalog::build_metric(dspec);
  for (const auto& q : samples(dspec, 10))
    CHECK(core::hamel_residual(def, q) < 1e-9);

  const ScalarField skew(
      [](const JetVars& v) {
        return sqrt(v.y[0] * v.y[0] + v.y[1] * v.y[1]) + v.x[0] * v.y[1];
      },
      1);
  CHECK(core::hamel_residual(skew, ChartPoint({1.0, 0.0}, {1.0, 1.0})) > 0.1);
}

TEST_CASE("projective factor and spray deformation") {
  const auto eucl = metric(Family::euclidean, 2);
  CHECK(core::projective_factor_flat(eucl, ChartPoint({0.3, 0.3}, {1.0, 0.0})) ==
        doctest::Approx(0.0));

  const MetricSpec rspec(Family::randers_pf, 2, {{"c", 0.5}});
  const auto rand = catalog::build_metric(rspec);
  for (const auto& q : samples(rspec, 10)) {
    const double P = core::projective_factor_flat(rand, q);
    CHECK(std::abs(P - 0.5 * rand.value(q)) < 1e-9);
  }

  // flat spray deformed by P = F/2 reproduces the Funk geodesic spray
  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  const ScalarField half_funk(
      [funk](const JetVars& v) { return funk.eval(v) * 0.5; }, 1);
  const auto deformed = core::deform_spray(SprayCoeffs::flat(), half_funk);
  for (const auto& q : samples(fspec, 10)) {
    const auto Gd = deformed.values(q);
    const auto Gf = core::geodesic_coefficients(funk, q);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(Gd[i] - Gf[i]) < 1e-9);
  }

  // deformation by P = 0 leaves coefficients unchanged
  const ScalarField zero([](const JetVars& v) { return v.constant(0.0); }, 1);
  const auto same = core::deform_spray(core::SprayCoeffs::geodesic(funk), zero);
  const ChartPoint q({0.2, 0.1}, {0.6, 0.8});
  const auto a = same.values(q);
  const auto b = core::SprayCoeffs::geodesic(funk).values(q);
  CHECK(a[0] == doctest::Approx(b[0]));
  CHECK(a[1] == doctest::Approx(b[1]));
}

TEST_CASE("flag curvature and cfc residual") {
  const MetricSpec rspec(Family::randers_pf, 2, {{"c", 0.3}});
  const auto rand = catalog::build_metric(rspec);
  for (const auto& q : samples(rspec, 5))
    CHECK(core::flag_curvature(rand, q) == doctest::Approx(-0.09));

  const MetricSpec dspec(Family::deformed_randers, 2);
  const auto def = catalog::build_metric(dspec);
  for (const auto& q : samples(dspec, 5))
    CHECK(core::flag_curvature(def, q) == doctest::Approx(-0.25));

  const MetricSpec bspec(Family::square_pf, 2, {{"c", 0.5}, {"eta", 1.0}});
  const auto berw = catalog::build_metric(bspec);
  for (const auto& q : samples(bspec, 5))
    CHECK(std::abs(core::flag_curvature(berw, q)) < 1e-8);

  const auto funk = metric(Family::funk, 2);
  const ChartPoint p({0.0, 0.0}, {0.0, 1.0});
  CHECK(core::cfc_residual(funk, p, -0.25) < 1e-9);
  CHECK(core::cfc_residual(funk, p, 0.0) > 0.1);
  const auto eucl = metric(Family::euclidean, 2);
  CHECK(core::cfc_residual(eucl, p, 0.0) < 1e-12);

  const auto bad = metric(Family::riemann_counterexample_3d, 3);
  CHECK_THROWS_AS(
      core::flag_curvature(bad, ChartPoint({0.5, 0.2, -0.1}, {0.5, 0.6, 0.6})),
      NonIsotropic);
}

TEST_CASE("isotropy extraction") {
  const auto eucl = metric(Family::euclidean, 2);
  const ChartPoint pe({0.1, 0.0}, {0.6, 0.8});
  const auto Phi0 = core::jacobi_endomorphism(eucl, pe);
  const auto iso0 = core::isotropy_extract(Phi0, core::ricci_scalar(Phi0, 2), pe);
  CHECK(max_abs(iso0.alpha) < 1e-12);
  CHECK(iso0.residual < 1e-12);

  const auto funk = metric(Family::funk, 2);
  const ChartPoint pf({0.0, 0.0}, {0.0, 1.0});
  const auto Phi = core::jacobi_endomorphism(funk, pf);
  const auto iso = core::isotropy_extract(Phi, core::ricci_scalar(Phi, 2), pf);
  CHECK(iso.alpha[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(iso.alpha[1] == doctest::Approx(-0.25));
  CHECK(iso.residual < 1e-9);

  // every 2-dimensional spray is isotropic
  for (auto fam : {Family::randers_pf, Family::square_pf,
                   Family::riemann_counterexample_2d}) {
    const MetricSpec spec(fam, 2);
    const auto F = catalog::build_metric(spec);
    for (const auto& q : samples(spec, 5)) {
      core::PointGeometry geo(F, q);
      const auto iso2 = geo.isotropy();
      CHECK(iso2.residual < 1e-8 * (1.0 + max_abs(geo.jacobi())));
    }
  }
}

TEST_CASE("dh_alpha residual") {
  const auto eucl = metric(Family::euclidean, 2);
  CHECK(core::dh_alpha_residual(eucl, ChartPoint({0.2, 0.1}, {0.9, 0.1})) < 1e-12);

  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  for (const auto& q : samples(fspec, 10))
    CHECK(core::dh_alpha_residual(funk, q) < 1e-8);

  // the 2D counterexample keeps W1 ~ 0 but fails d_h alpha = 0
  const MetricSpec cspec(Family::riemann_counterexample_2d, 2);
  const auto bad = catalog::build_metric(cspec);
  double dh = 0.0, w1 = 0.0;
  for (const auto& q : samples(cspec, 10)) {
    core::PointGeometry geo(bad, q);
    dh = std::max(dh, geo.dh_alpha_residual());
    w1 = std::max(w1, max_abs(geo.w1()));
  }
  CHECK(dh > 1e-3);
  CHECK(w1 < 1e-8);
}

TEST_CASE("closedness residual") {
  const MetricSpec rspec(Family::randers_pf, 2, {{"c", 0.4}});
  const auto b = catalog::b_form(rspec);
  for (const auto& q : samples(rspec, 5))
    CHECK(core::closedness_residual(b, q) < 1e-10);

  const ScalarField skewb([](const JetVars& v) { return v.x[0] * v.y[1]; }, 1);
  CHECK(core::closedness_residual(skewb, ChartPoint({0.3, 0.4}, {1.0, 0.2})) ==
        doctest::Approx(1.0));

  const auto bbar = catalog::bbar_field(-0.5, {0.1, 0.0}, 1.0, 2);
  CHECK(core::closedness_residual(bbar, ChartPoint({0.2, -0.3}, {0.7, 0.7})) <
        1e-10);

  const auto funk = metric(Family::funk, 2);
  CHECK_THROWS_AS(
      core::closedness_residual(funk, ChartPoint({0.1, 0.1}, {0.5, 0.5})),
      NotLinear);
}

TEST_CASE("levi-civita residual") {
  const MetricSpec kspec(Family::klein, 2, {{"mu", -1.0}});
  const auto klein = catalog::build_metric(kspec);
  for (const auto& q : samples(kspec, 10)) {
    const auto a = core::levi_civita_analysis(klein, q);
    CHECK(a.riemann_deviation < 1e-10);
    CHECK(a.factor_linearity < 1e-10);
    CHECK(a.residual < 1e-9);
  }

  const auto eucl = metric(Family::euclidean, 2);
  CHECK(core::levi_civita_residual(eucl, ChartPoint({0.4, 0.1}, {0.3, 1.0})) <
        1e-12);

  const MetricSpec cspec(Family::riemann_counterexample_2d, 2);
  const auto bad = catalog::build_metric(cspec);
  double res = 0.0;
  for (const auto& q : samples(cspec, 10))
    res = std::max(res, core::levi_civita_analysis(bad, q).residual);
  CHECK(res > 1e-3);

  const auto funk = metric(Family::funk, 2);
  CHECK_THROWS_AS(
      core::levi_civita_residual(funk, ChartPoint({0.2, 0.1}, {0.6, 0.8})),
      NotRiemannian);
}

TEST_CASE("transformation identities") {
  const ScalarField zero([](const JetVars& v) { return v.constant(0.0); }, 1);
  const ChartPoint p({0.2, -0.1}, {0.8, 0.6});
  CHECK(core::verify_phibar(SprayCoeffs::flat(), zero, p) < 1e-12);
  CHECK(core::verify_pw1(SprayCoeffs::flat(), zero, p) < 1e-12);
  CHECK(core::verify_dhalpha_transform(SprayCoeffs::flat(), zero, p) < 1e-12);

  // flat -> Funk deformation
  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  const ScalarField half_funk(
      [funk](const JetVars& v) { return funk.eval(v) * 0.5; }, 1);
  for (const auto& q : samples(fspec, 10)) {
    CHECK(core::verify_phibar(SprayCoeffs::flat(), half_funk, q) < 1e-8);
    CHECK(core::verify_pw1(SprayCoeffs::flat(), half_funk, q) < 1e-7);
  }

  // Randers-family spray deformed by P = nu * bbar
  const MetricSpec rspec(Family::randers_pf, 2, {{"c", 0.5}});
  const auto rand = catalog::build_metric(rspec);
  const auto base = SprayCoeffs::geodesic(rand);
  const double nu = -0.5;
  const auto bbar = catalog::bbar_field(nu, {0.1, 0.0}, 1.0, 2);
  const ScalarField P([bbar, nu](const JetVars& v) { return bbar.eval(v) * nu; },
                      1);
  for (const auto& q : samples(rspec, 10)) {
    CHECK(core::verify_phibar(base, P, q) < 1e-8);
    CHECK(core::verify_pw1(base, P, q) < 1e-7);
    CHECK(core::verify_dhalpha_transform(base, P, q) < 1e-7);
  }

  // Hamel P = y^1 leaves W1 unchanged
  const ScalarField y1([](const JetVars& v) { return v.y[0] * 1.0; }, 1);
  for (const auto& q : samples(rspec, 5)) {
    core::PointGeometry geo(base, q);
    core::PointGeometry geod(base.deformed(y1), q);
    const auto W1 = geo.w1();
    const auto W1d = geod.w1();
    for (size_t i = 0; i < W1.a.size(); ++i)
      CHECK(std::abs(W1.a[i] - W1d.a[i]) < 1e-9);
  }
  // and the flat-spray version stays exactly flat
  core::PointGeometry flat_def(SprayCoeffs::flat().deformed(y1),
                               ChartPoint({0.4, 0.2}, {0.7, 0.7}));
  CHECK(max_abs(flat_def.w1()) < 1e-13);
  CHECK(core::verify_dhalpha_transform(SprayCoeffs::flat(), y1,
                                       ChartPoint({0.4, 0.2}, {0.7, 0.7})) <
        1e-9);

  // non-Hamel P is rejected for the d_h alpha transformation law
  CHECK_THROWS_AS(
      core::verify_dhalpha_transform(SprayCoeffs::flat(),
                                     ScalarField([](const JetVars& v) {
                                       return v.x[0] * v.y[1];
                                     }, 1),
                                     ChartPoint({0.5, 0.1}, {1.0, 0.4})),
      NotHamel);
}

TEST_CASE("geodesic integration and straightness") {
  const auto eucl = core::SprayCoeffs::flat();
  const auto line = core::geodesic_integrate(eucl, {0.1, -0.2}, {0.3, 0.4},
                                             1e-2, 100);
  CHECK(!line.exited_at);
  CHECK(core::straightness_residual(line.points) < 1e-12);

  const MetricSpec fspec(Family::funk, 2);
  const auto funk = catalog::build_metric(fspec);
  const auto S = core::SprayCoeffs::geodesic(funk);
  const auto path = core::geodesic_integrate(
      S, {0.0, 0.0}, {0.3, 0.4}, 1e-3, 500, catalog::domain_predicate(fspec));
  CHECK(!path.exited_at);
  CHECK(path.points.size() == 501);
  CHECK(core::straightness_residual(path.points) < 1e-6);

  // curved Riemannian metric bends away from the straight line
  const MetricSpec cspec(Family::riemann_counterexample_2d, 2);
  const auto bad = catalog::build_metric(cspec);
  const auto Sb = core::SprayCoeffs::geodesic(bad);
  const auto bent = core::geodesic_integrate(
      Sb, {0.5, 0.0}, {0.6, 0.8}, 1e-3, 500, catalog::domain_predicate(cspec));
  CHECK(!bent.exited_at);
  CHECK(core::straightness_residual(bent.points) > 1e-3);

  // leaving the Funk disc aborts with the last valid index
  const auto out = core::geodesic_integrate(
      S, {0.9, 0.0}, {1.0, 0.0}, 1e-2, 500, catalog::domain_predicate(fspec));
  CHECK(out.exited_at.has_value());
  CHECK(out.points.size() <= 501);
}

TEST_CASE("homogeneity chain across the catalog") {
  for (auto fam :
       {Family::euclidean, Family::klein, Family::randers_pf,
        Family::deformed_randers, Family::funk, Family::generalized_funk,
        Family::square_pf, Family::conformal_pf, Family::randers_nonclosed}) {
    const MetricSpec spec(fam, 2);
    const auto F = catalog::build_metric(spec);
    for (const auto& q : samples(spec, 5)) {
      const auto vars = JetVars::seed(q, core::kDefaultJetDegree);
      const auto Fj = F.eval(vars);
      // Euler: y^i dF/dy^i = F
      double euler = -Fj.value();
      for (int i = 0; i < 2; ++i) {
        jets::MultiIndex m(4, 0);
        ++m[2 + i];
        euler += q.y[i] * Fj.partial(m);
      }
      CHECK(std::abs(euler) < 1e-10 * (1.0 + std::abs(Fj.value())));

      core::PointGeometry geo(F, q);
      // g_ij y^i y^j = F^2
      const auto g = geo.metric();
      double gyy = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gyy += g(i, j) * q.y[i] * q.y[j];
      const double F2 = Fj.value() * Fj.value();
      CHECK(std::abs(gyy - F2) < 1e-10 * (1.0 + F2));

      // 2-homogeneity of G and Phi, 1-homogeneity of N via Euler contractions
      const auto vars2 = vars;
      const auto& y = vars2.y;
      auto euler_check = [&](const jets::Jet& f, int degree) {
        jets::Jet acc = f * double(-degree);
        for (int i = 0; i < 2; ++i)
          acc += y[i] * f.derivative(vars2.y_var(i));
        return std::abs(acc.value());
      };
      for (int i = 0; i < 2; ++i) {
        CHECK(euler_check(geo.spray_jet(i), 2) < 1e-9);
        for (int j = 0; j < 2; ++j) {
          CHECK(euler_check(geo.connection_jet(i, j), 1) < 1e-9);
          CHECK(euler_check(geo.jacobi_jet(i, j), 2) <
                1e-9 * (1.0 + max_abs(geo.jacobi())));
        }
      }
    }
  }
}

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "finsler/chart.hpp"
#include "finsler/tensor.hpp"

namespace finsler::core {

/// Seed degree that supports the full curvature chain: G consumes 2
/// derivative levels of F^2, N three, Phi four, and R / d_J(TrPhi) five.
constexpr int kDefaultJetDegree = 5;

/// All tensors of one metric/spray evaluated at one ChartPoint.
struct GeometryBundle {
  int n = 0;
  double F = 0.0;
  Matrix g;
  std::vector<double> G;
  Matrix N;
  Matrix Phi;
  double rho = 0.0;
  Tensor3 R;
  Matrix W0;
  Tensor3 W1;
  std::optional<double> kappa;  // set when the spray is isotropic at p
  double isotropy_residual = 0.0;
};

struct IsotropyResult {
  std::vector<double> alpha;
  double residual;
};

/// Lazily computed geometry of one spray at one seeded chart point. All
/// quantities are obtained from jet calculus on the spray coefficients;
/// values are exact to rounding as long as the seed degree covers the
/// derivative depth (kDefaultJetDegree covers everything here).
class PointGeometry {
 public:
  PointGeometry(const ScalarField& F, const ChartPoint& p,
                int degree = kDefaultJetDegree);
  PointGeometry(const SprayCoeffs& S, const ChartPoint& p,
                int degree = kDefaultJetDegree);

  int n() const { return p_.n(); }
  const ChartPoint& point() const { return p_; }
  const JetVars& vars() const { return vars_; }

  const jets::Jet& F_jet();              // requires metric construction
  const jets::Jet& spray_jet(int i);
  const jets::Jet& connection_jet(int i, int j);
  const jets::Jet& jacobi_jet(int i, int j);
  const jets::Jet& trphi_jet();
  const jets::Jet& alpha_jet(int j);

  Matrix metric();                       // g_ij values (metric construction)
  std::vector<double> spray();           // G^i
  Matrix connection();                   // N^i_j
  Matrix jacobi();                       // Phi^i_j
  double ricci();                        // rho = Tr(Phi)/(n-1)
  Tensor3 curvature();                   // R^i_jk = (1/3)(dPhi^i_j/dy^k - dPhi^i_k/dy^j)
  std::vector<double> tau();             // d_J(Tr Phi)
  Matrix w0();
  Tensor3 w1();
  IsotropyResult isotropy();
  Matrix dh_alpha();                     // (d_h alpha)_jk, antisymmetric
  double dh_alpha_residual();
  double flag_curvature();               // throws NonIsotropic
  double cfc_residual(double kappa);     // requires metric construction
  GeometryBundle bundle();

 private:
  void ensure_spray();
  void ensure_connection();
  void ensure_phi();
  void ensure_alpha();

  ScalarField F_;
  SprayCoeffs S_;
  ChartPoint p_;
  JetVars vars_;
  std::optional<jets::Jet> Fj_;
  std::optional<std::vector<jets::Jet>> gj_;     // n*n, row-major
  std::optional<std::vector<jets::Jet>> G_;      // n
  std::optional<std::vector<jets::Jet>> N_;      // n*n
  std::optional<std::vector<jets::Jet>> Phi_;    // n*n
  std::optional<jets::Jet> trphi_;
  std::optional<std::vector<jets::Jet>> alpha_;  // n
};

// ---- coordinate-level operators -------------------------------------------

/// g_ij = 1/2 d^2(F^2)/dy^i dy^j at p. Throws OutsideDomain on non-finite
/// jets and DegenerateMetric when g is singular.
Matrix metric_tensor(const ScalarField& F, const ChartPoint& p);

/// Geodesic spray coefficients G^i of F at p.
std::vector<double> geodesic_coefficients(const ScalarField& F,
                                          const ChartPoint& p);

/// N^i_j = dG^i/dy^j at p.
Matrix nonlinear_connection(const ScalarField& F, const ChartPoint& p);

/// Jacobi endomorphism Phi^i_j = 2 dG^i/dx^j|_h - S(N^i_j) + N^i_k N^k_j.
/// `spray` overrides the geodesic spray of F (deformed sprays etc.).
Matrix jacobi_endomorphism(const ScalarField& F, const ChartPoint& p,
                           const SprayCoeffs* spray = nullptr);

double ricci_scalar(const Matrix& Phi, int n);

Tensor3 curvature_tensor(const ScalarField& F, const ChartPoint& p,
                         const SprayCoeffs* spray = nullptr);

Matrix weyl_w0(const ScalarField& F, const ChartPoint& p,
               const SprayCoeffs* spray = nullptr);

Tensor3 weyl_w1(const ScalarField& F, const ChartPoint& p,
                const SprayCoeffs* spray = nullptr);

/// Euler-Lagrange 1-form (delta_S L)_i = S(dL/dy^i) - dL/dx^i.
std::vector<double> euler_lagrange(const ScalarField& L, const SprayCoeffs& S,
                                   const ChartPoint& p);

/// Max-norm of the Euler-Lagrange form of F along the flat spray; zero iff
/// F is projectively flat at p (Hamel).
double hamel_residual(const ScalarField& F, const ChartPoint& p);

/// Projective factor of a projectively flat metric, P = S0(F)/(2F).
ScalarField projective_factor_flat_field(const ScalarField& F);
double projective_factor_flat(const ScalarField& F, const ChartPoint& p);

/// Relative projective factor P = S(F)/(2F) of F against an arbitrary spray.
ScalarField projective_factor_field(const ScalarField& F,
                                    const SprayCoeffs& S);

/// Gbar^i = G^i + P y^i.
SprayCoeffs deform_spray(const SprayCoeffs& base, const ScalarField& P);

/// kappa = rho/F^2 for isotropic sprays; throws NonIsotropic otherwise.
double flag_curvature(const ScalarField& F, const ChartPoint& p);

/// Max-norm of Phi^i_j - kappa F^2 delta^i_j + kappa F (dF/dy^j) y^i.
double cfc_residual(const ScalarField& F, const ChartPoint& p, double kappa);

/// Least-squares extraction of alpha from Phi = rho J - alpha (x) C.
IsotropyResult isotropy_extract(const Matrix& Phi, double rho,
                                const ChartPoint& p);

/// Max-norm of (d_h alpha)_jk for the geodesic spray of F.
double dh_alpha_residual(const ScalarField& F, const ChartPoint& p);

/// For b linear in y: max |d(b_i)/dx^j - d(b_j)/dx^i|. Throws NotLinear.
double closedness_residual(const ScalarField& b, const ChartPoint& p);

struct LeviCivitaAnalysis {
  double riemann_deviation;   // max |dg_ij/dy^k|
  double factor_linearity;    // max |d^2 P / dy dy|
  double residual;            // max |g_ij,l - 2 psi_l g_ij - psi_i g_jl - psi_j g_il|
};
LeviCivitaAnalysis levi_civita_analysis(const ScalarField& F,
                                        const ChartPoint& p);
/// Strict form: throws NotRiemannian / NotLinearFactor before returning the
/// residual.
double levi_civita_residual(const ScalarField& F, const ChartPoint& p);

/// |Phibar(direct) - [Phi + (P^2-SP)J - (P d_JP + d_J(SP) - 3 d_hP) (x) C]|.
double verify_phibar(const SprayCoeffs& base, const ScalarField& P,
                     const ChartPoint& p, int degree = kDefaultJetDegree);

/// |W1bar(direct) - [W1 + 1/2 delta_S P ^ J + d_J d_h P (x) C]|.
double verify_pw1(const SprayCoeffs& base, const ScalarField& P,
                  const ChartPoint& p, int degree = kDefaultJetDegree);

/// |d_hbar(alphabar) - [d_h alpha - d_R P - P d_J alpha + alpha ^ d_J P]|.
/// Requires P Hamel for `base`; throws NotHamel otherwise.
double verify_dhalpha_transform(const SprayCoeffs& base, const ScalarField& P,
                                const ChartPoint& p,
                                int degree = kDefaultJetDegree);

struct GeodesicPath {
  std::vector<std::vector<double>> points;  // base points x per step
  std::optional<int> exited_at;             // index of last in-domain point
};

/// Classical RK4 on xdot = y, ydot = -2G(x, y) with fixed step.
GeodesicPath geodesic_integrate(
    const SprayCoeffs& S, const std::vector<double>& x0,
    const std::vector<double>& y0, double dt, int steps,
    const std::function<bool(const ChartPoint&)>& in_domain = {});

/// Max perpendicular distance of path points to the line through the first
/// point directed along the initial velocity.
double straightness_residual(const std::vector<std::vector<double>>& path);

GeometryBundle compute_bundle(const ScalarField& F, const ChartPoint& p,
                              int degree = kDefaultJetDegree,
                              const SprayCoeffs* spray = nullptr);

namespace detail {
/// Shared metric->spray pipeline over jets: F, L = F^2, g, and the solved
/// G^i at one seeded point.
struct MetricJets {
  jets::Jet F, L;
  std::vector<jets::Jet> g;  // n*n
  std::vector<jets::Jet> G;  // n
};
MetricJets metric_jets(const ScalarField& F, const JetVars& vars);
std::vector<jets::Jet> geodesic_spray_jets(const ScalarField& F,
                                           const JetVars& vars);
}  // namespace detail

}  // namespace finsler::core

#include "finsler/chart.hpp"

#include <algorithm>
#include <stdexcept>

#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"

namespace finsler::core {

ChartPoint::ChartPoint(std::vector<double> x_, std::vector<double> y_)
    : x(std::move(x_)), y(std::move(y_)) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("ChartPoint: x and y must share a dimension");
  bool nonzero = false;
  for (double v : y) nonzero = nonzero || v != 0.0;
  if (!nonzero) throw std::invalid_argument("ChartPoint: y must be nonzero");
}

JetVars JetVars::seed(const ChartPoint& p, int degree) {
  JetVars v;
  v.n = p.n();
  v.degree = degree;
  const int nv = 2 * v.n;
  v.x.reserve(v.n);
  v.y.reserve(v.n);
  for (int i = 0; i < v.n; ++i)
    v.x.push_back(jets::Jet::variable(i, p.x[i], nv, degree));
  for (int i = 0; i < v.n; ++i)
    v.y.push_back(jets::Jet::variable(v.n + i, p.y[i], nv, degree));
  return v;
}

jets::Jet JetVars::constant(double v) const {
  return jets::Jet::constant(v, 2 * n, degree);
}

double ScalarField::value(const ChartPoint& p) const {
  const int deg = std::max(1, deficit_);
  return ev_(JetVars::seed(p, deg)).value();
}

SprayCoeffs SprayCoeffs::flat() {
  return SprayCoeffs(
      [](const JetVars& vars) {
        std::vector<jets::Jet> G;
        G.reserve(vars.n);
        for (int i = 0; i < vars.n; ++i) G.push_back(vars.constant(0.0));
        return G;
      },
      0);
}

SprayCoeffs SprayCoeffs::geodesic(const ScalarField& F) {
  const int deficit = F.jet_deficit() + 2;
  return SprayCoeffs(
      [F](const JetVars& vars) { return detail::geodesic_spray_jets(F, vars); },
      deficit);
}

SprayCoeffs SprayCoeffs::deformed(const ScalarField& P) const {
  if (!*this) throw std::logic_error("SprayCoeffs::deformed on empty spray");
  const SprayCoeffs base = *this;
  const int deficit = std::max(deficit_, P.jet_deficit());
  return SprayCoeffs(
      [base, P](const JetVars& vars) {
        std::vector<jets::Jet> G = base.eval(vars);
        const jets::Jet pj = P.eval(vars);
        for (int i = 0; i < vars.n; ++i) G[i] += pj * vars.y[i];
        return G;
      },
      deficit);
}

std::vector<double> SprayCoeffs::values(const ChartPoint& p) const {
  const int deg = std::max(1, deficit_);
  const auto G = eval(JetVars::seed(p, deg));
  std::vector<double> out(G.size());
  for (size_t i = 0; i < G.size(); ++i) out[i] = G[i].value();
  return out;
}

}  // namespace finsler::core

#pragma once

#include <functional>
#include <vector>

#include "finsler/jet.hpp"

namespace finsler::core {

/// A base point x with a nonzero fiber vector y in one coordinate chart.
struct ChartPoint {
  std::vector<double> x, y;

  ChartPoint() = default;
  ChartPoint(std::vector<double> x_, std::vector<double> y_);
  int n() const { return int(x.size()); }
};

/// The 2n chart variables seeded as jets at a ChartPoint: variable i is
/// x^i, variable n+i is y^i. Every field evaluation works on these.
struct JetVars {
  int n = 0;
  int degree = 0;
  std::vector<jets::Jet> x, y;

  static JetVars seed(const ChartPoint& p, int degree);
  jets::Jet constant(double v) const;

  int x_var(int i) const { return i; }
  int y_var(int i) const { return n + i; }
};

/// Scalar quantity on the slit tangent bundle, evaluated through jets.
/// `homogeneity` is the declared positive homogeneity degree in y;
/// `jet_deficit` is how many derivative levels the evaluator consumes from
/// its seeds (0 for closed forms, >0 for derived quantities such as
/// projective factors).
class ScalarField {
 public:
  using Evaluator = std::function<jets::Jet(const JetVars&)>;

  ScalarField() = default;
  ScalarField(Evaluator ev, int homogeneity, int jet_deficit = 0)
      : ev_(std::move(ev)), homogeneity_(homogeneity), deficit_(jet_deficit) {}

  jets::Jet eval(const JetVars& vars) const { return ev_(vars); }
  /// Plain value at a point (seeds the minimal jet degree needed).
  double value(const ChartPoint& p) const;

  int homogeneity() const { return homogeneity_; }
  int jet_deficit() const { return deficit_; }
  explicit operator bool() const { return bool(ev_); }

 private:
  Evaluator ev_;
  int homogeneity_ = 0;
  int deficit_ = 0;
};

/// Spray coefficients G^i(x, y), 2-homogeneous in y. The flat spray has
/// G = 0; geodesic sprays are solved from a Finsler function; projective
/// deformations add P*y^i.
class SprayCoeffs {
 public:
  using Evaluator = std::function<std::vector<jets::Jet>(const JetVars&)>;

  SprayCoeffs() = default;

  static SprayCoeffs flat();
  /// Geodesic spray of F: G^i = 1/4 g^{il} (y^k d2(F^2)/dy^l dx^k - d(F^2)/dx^l).
  static SprayCoeffs geodesic(const ScalarField& F);
  /// Projective deformation G^i + P y^i.
  SprayCoeffs deformed(const ScalarField& P) const;

  std::vector<jets::Jet> eval(const JetVars& vars) const { return ev_(vars); }
  std::vector<double> values(const ChartPoint& p) const;

  int jet_deficit() const { return deficit_; }
  explicit operator bool() const { return bool(ev_); }

 private:
  SprayCoeffs(Evaluator ev, int deficit) : ev_(std::move(ev)), deficit_(deficit) {}

  Evaluator ev_;
  int deficit_ = 0;
};

}  // namespace finsler::core

#include "finsler/fd_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace finsler::core {

namespace {

struct Tap {
  int offset;     // multiple of h along one variable
  double weight;  // times h^{-order}
};

// O(h^2) central stencils for the m-th derivative in one variable.
const std::vector<Tap>& stencil(int m) {
  static const std::vector<Tap> s1 = {{-1, -0.5}, {1, 0.5}};
  static const std::vector<Tap> s2 = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<Tap> s3 = {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
  switch (m) {
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    default: throw std::invalid_argument("fd_oracle: per-variable order > 3");
  }
}

double apply_stencils(const std::function<double(const ChartPoint&)>& f,
                      const ChartPoint& p, const std::vector<int>& vars,
                      const std::vector<int>& orders,
                      const std::vector<double>& steps, size_t level,
                      ChartPoint& scratch) {
  if (level == vars.size()) return f(scratch);
  const int n = p.n();
  const int v = vars[level];
  double acc = 0.0;
  double* coord = v < n ? &scratch.x[v] : &scratch.y[v - n];
  const double base = *coord;
  const double h = steps[level];
  for (const Tap& t : stencil(orders[level])) {
    *coord = base + t.offset * h;
    acc += t.weight *
           apply_stencils(f, p, vars, orders, steps, level + 1, scratch);
  }
  *coord = base;
  double scale = 1.0;
  for (int k = 0; k < orders[level]; ++k) scale *= h;
  return acc / scale;
}

}  // namespace

double fd_oracle(const std::function<double(const ChartPoint&)>& f,
                 const ChartPoint& p, const jets::MultiIndex& idx,
                 double step) {
  const int n = p.n();
  if (int(idx.size()) != 2 * n)
    throw std::invalid_argument("fd_oracle: multi-index must cover 2n variables");

  std::vector<int> vars, orders;
  int total = 0;
  for (int v = 0; v < 2 * n; ++v) {
    if (idx[v] < 0) throw std::invalid_argument("fd_oracle: negative exponent");
    if (idx[v] == 0) continue;
    vars.push_back(v);
    orders.push_back(idx[v]);
    total += idx[v];
  }
  if (total == 0) return f(p);
  if (total > 3) throw std::invalid_argument("fd_oracle: total order > 3");

  std::vector<double> steps(vars.size());
  for (size_t k = 0; k < vars.size(); ++k) {
    double h = step;
    if (h <= 0.0) {
      const double eps = std::numeric_limits<double>::epsilon();
      h = std::pow(eps, 1.0 / (total + 2));
    }
    const int v = vars[k];
    const double coord = v < n ? p.x[v] : p.y[v - n];
    steps[k] = h * std::max(1.0, std::abs(coord));
  }

  ChartPoint scratch = p;
  const double coarse = apply_stencils(f, p, vars, orders, steps, 0, scratch);
  for (double& h : steps) h *= 0.5;
  const double fine = apply_stencils(f, p, vars, orders, steps, 0, scratch);
  return (4.0 * fine - coarse) / 3.0;  // one Richardson level, O(h^4)
}

}  // namespace finsler::core

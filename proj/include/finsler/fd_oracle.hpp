#pragma once

#include <functional>

#include "finsler/chart.hpp"
#include "finsler/jet.hpp"

namespace finsler::core {

/// Central finite differences with one Richardson extrapolation level,
/// independent of the jet engine. The multi-index runs over the 2n chart
/// variables (x first, then y); per-variable derivative order <= 3 and
/// total order <= 3 are supported (accuracy degrades beyond).
///
/// With step h the raw tensor-product stencil has O(h^2) truncation error;
/// the Richardson combination (4 D_{h/2} - D_h)/3 raises it to O(h^4).
/// step == 0 selects h = eps^(1/(order+2)) scaled by coordinate magnitude.
double fd_oracle(const std::function<double(const ChartPoint&)>& f,
                 const ChartPoint& p, const jets::MultiIndex& idx,
                 double step = 0.0);

}  // namespace finsler::core

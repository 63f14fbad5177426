#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace finsler::jets {

/// Exponent vector over the chart variables; entry k is the exponent of
/// variable k. Total degree is the sum of entries.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& idx);

/// Shared combinatorial tables for truncated Taylor polynomials in
/// `num_vars` variables up to total degree `max_degree`: the graded
/// lexicographic rank <-> multi-index maps, the exponent-bump table and the
/// Cauchy-product pair table. Layouts are immutable and cached per
/// (num_vars, max_degree).
class JetLayout {
 public:
  static std::shared_ptr<const JetLayout> get(int num_vars, int max_degree);

  int num_vars() const { return num_vars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return size_; }

  int rank_of(const MultiIndex& idx) const;  // -1 if outside the layout
  MultiIndex index_of(int rank) const;
  int degree_of(int rank) const { return degree_[rank]; }
  int exponent(int rank, int var) const { return exps_[rank * num_vars_ + var]; }

  /// Rank of index_of(rank) + e_var, or -1 when that exceeds max_degree.
  int bump(int rank, int var) const { return bump_[rank * num_vars_ + var]; }

  /// prod of factorials of the exponents at `rank` (converts a Taylor
  /// coefficient into the mixed partial derivative).
  double factorial_scale(int rank) const { return fact_[rank]; }

  struct Pair {
    int32_t a, b;
  };
  /// All ordered pairs (ra, rb) with index_of(ra) + index_of(rb) == index_of(rc).
  std::span<const Pair> products_into(int rc) const {
    return {pairs_.data() + pair_off_[rc],
            pairs_.data() + pair_off_[rc + 1]};
  }

 private:
  JetLayout(int num_vars, int max_degree);

  int num_vars_, max_degree_, size_;
  std::vector<int> exps_;       // size_ x num_vars_
  std::vector<int> degree_;     // per rank
  std::vector<int> bump_;       // size_ x num_vars_
  std::vector<double> fact_;    // per rank
  std::vector<Pair> pairs_;     // grouped by result rank
  std::vector<int> pair_off_;   // size_ + 1 offsets into pairs_
  std::vector<uint64_t> pack_keys_;  // sorted packed exponents, for rank_of
  std::vector<int> pack_ranks_;
};

/// Truncated multivariate Taylor polynomial (a "jet") of a scalar quantity
/// around an expansion point, closed under arithmetic at fixed max_degree.
///
/// Coefficients of total degree <= valid_degree() are exact to rounding;
/// formal differentiation lowers valid_degree by one because the
/// highest-order coefficients of the derivative are unknown to the
/// truncation. Arithmetic propagates the weakest validity of its operands.
class Jet {
 public:
  /// Constant value: degree-0 coefficient only.
  static Jet constant(double value, int num_vars, int max_degree);
  /// Seeded chart variable: value plus a unit first-order coefficient.
  static Jet variable(int var_index, double value, int num_vars, int max_degree);

  int num_vars() const { return layout_->num_vars(); }
  int max_degree() const { return layout_->max_degree(); }
  int valid_degree() const { return valid_; }
  const JetLayout& layout() const { return *layout_; }

  /// Value of the underlying function at the expansion point.
  double value() const { return c_[0]; }
  /// Raw Taylor coefficient.
  double coefficient(const MultiIndex& idx) const;
  /// True mixed partial derivative at the expansion point:
  /// coefficient(idx) * prod(idx_k!).
  double partial(const MultiIndex& idx) const;

  /// Formal partial derivative with respect to one chart variable.
  /// valid_degree drops by one.
  Jet derivative(int var) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(double s, const Jet& a);

  friend Jet sqrt(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet pow_int(const Jet& a, int k);

  bool all_finite() const;

 private:
  explicit Jet(std::shared_ptr<const JetLayout> layout);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
  int valid_;
};

void check_same_shape(const Jet& a, const Jet& b);

}  // namespace finsler::jets

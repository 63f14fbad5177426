#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace finsler::jets {

namespace {

constexpr int kMaxVars = 16;
constexpr int kMaxDegree = 12;  // packing below uses 4 bits per exponent

uint64_t pack(const int* exps, int num_vars) {
  uint64_t key = 0;
  for (int v = 0; v < num_vars; ++v) key |= uint64_t(exps[v]) << (4 * v);
  return key;
}

// Emits all exponent vectors of total degree `deg` in lexicographically
// descending order (so ranks are graded-lex overall).
void emit_degree(int deg, int var, std::vector<int>& cur,
                 std::vector<int>& out) {
  if (var == int(cur.size()) - 1) {
    cur[var] = deg;
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[var] = e;
    emit_degree(deg - e, var + 1, cur, out);
  }
}

}  // namespace

int total_degree(const MultiIndex& idx) {
  int d = 0;
  for (int e : idx) d += e;
  return d;
}

JetLayout::JetLayout(int num_vars, int max_degree)
    : num_vars_(num_vars), max_degree_(max_degree) {
  std::vector<int> cur(num_vars);
  for (int d = 0; d <= max_degree; ++d) emit_degree(d, 0, cur, exps_);
  size_ = int(exps_.size()) / num_vars;

  degree_.resize(size_);
  fact_.resize(size_);
  std::vector<std::pair<uint64_t, int>> keyed(size_);
  for (int r = 0; r < size_; ++r) {
    const int* e = &exps_[r * num_vars];
    int d = 0;
    double f = 1.0;
    for (int v = 0; v < num_vars; ++v) {
      d += e[v];
      for (int k = 2; k <= e[v]; ++k) f *= k;
    }
    degree_[r] = d;
    fact_[r] = f;
    keyed[r] = {pack(e, num_vars), r};
  }
  std::sort(keyed.begin(), keyed.end());
  pack_keys_.resize(size_);
  pack_ranks_.resize(size_);
  for (int i = 0; i < size_; ++i) {
    pack_keys_[i] = keyed[i].first;
    pack_ranks_[i] = keyed[i].second;
  }

  bump_.assign(size_t(size_) * num_vars, -1);
  std::vector<int> tmp(num_vars);
  for (int r = 0; r < size_; ++r) {
    if (degree_[r] == max_degree) continue;
    for (int v = 0; v < num_vars; ++v) {
      std::copy_n(&exps_[r * num_vars], num_vars, tmp.begin());
      ++tmp[v];
      bump_[r * num_vars + v] = rank_of(tmp);
    }
  }

  // Cauchy-product table grouped by result rank.
  std::vector<int> deg_first(max_degree + 2, size_);
  for (int r = size_ - 1; r >= 0; --r) deg_first[degree_[r]] = r;
  deg_first[max_degree + 1] = size_;

  std::vector<int> count(size_, 0);
  auto rank_sum = [&](int ra, int rb) {
    for (int v = 0; v < num_vars; ++v)
      tmp[v] = exps_[ra * num_vars + v] + exps_[rb * num_vars + v];
    return rank_of(tmp);
  };
  for (int ra = 0; ra < size_; ++ra) {
    const int limit = deg_first[max_degree - degree_[ra] + 1];
    for (int rb = 0; rb < limit; ++rb) ++count[rank_sum(ra, rb)];
  }
  pair_off_.assign(size_ + 1, 0);
  for (int r = 0; r < size_; ++r) pair_off_[r + 1] = pair_off_[r] + count[r];
  pairs_.resize(pair_off_[size_]);
  std::vector<int> cursor(pair_off_.begin(), pair_off_.end() - 1);
  for (int ra = 0; ra < size_; ++ra) {
    const int limit = deg_first[max_degree - degree_[ra] + 1];
    for (int rb = 0; rb < limit; ++rb)
      pairs_[cursor[rank_sum(ra, rb)]++] = {int32_t(ra), int32_t(rb)};
  }
}

int JetLayout::rank_of(const MultiIndex& idx) const {
  if (int(idx.size()) != num_vars_) return -1;
  int d = 0;
  for (int e : idx) {
    if (e < 0) return -1;
    d += e;
  }
  if (d > max_degree_) return -1;
  const uint64_t key = pack(idx.data(), num_vars_);
  auto it = std::lower_bound(pack_keys_.begin(), pack_keys_.end(), key);
  if (it == pack_keys_.end() || *it != key) return -1;
  return pack_ranks_[it - pack_keys_.begin()];
}

MultiIndex JetLayout::index_of(int rank) const {
  return MultiIndex(exps_.begin() + size_t(rank) * num_vars_,
                    exps_.begin() + size_t(rank + 1) * num_vars_);
}

std::shared_ptr<const JetLayout> JetLayout::get(int num_vars, int max_degree) {
  if (num_vars < 1 || num_vars > kMaxVars)
    throw std::invalid_argument("JetLayout: num_vars out of range [1," +
                                std::to_string(kMaxVars) + "]");
  if (max_degree < 1 || max_degree > kMaxDegree)
    throw std::invalid_argument("JetLayout: max_degree out of range [1," +
                                std::to_string(kMaxDegree) + "]");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{num_vars, max_degree}];
  if (!slot) slot.reset(new JetLayout(num_vars, max_degree));
  return slot;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout)
    : layout_(std::move(layout)),
      c_(layout_->size(), 0.0),
      valid_(layout_->max_degree()) {}

Jet Jet::constant(double value, int num_vars, int max_degree) {
  Jet j(JetLayout::get(num_vars, max_degree));
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int var_index, double value, int num_vars, int max_degree) {
  if (var_index < 0 || var_index >= num_vars)
    throw std::out_of_range("Jet::variable: var_index out of range");
  Jet j(JetLayout::get(num_vars, max_degree));
  j.c_[0] = value;
  MultiIndex unit(num_vars, 0);
  unit[var_index] = 1;
  j.c_[j.layout_->rank_of(unit)] = 1.0;
  return j;
}

void check_same_shape(const Jet& a, const Jet& b) {
  if (a.num_vars() != b.num_vars() || a.max_degree() != b.max_degree())
    throw std::invalid_argument("jet shape mismatch");
}

double Jet::coefficient(const MultiIndex& idx) const {
  const int r = layout_->rank_of(idx);
  if (r < 0) throw std::out_of_range("Jet::coefficient: index exceeds max_degree");
  return c_[r];
}

double Jet::partial(const MultiIndex& idx) const {
  const int r = layout_->rank_of(idx);
  if (r < 0) throw std::out_of_range("Jet::partial: index exceeds max_degree");
  if (layout_->degree_of(r) > valid_)
    throw std::logic_error("Jet::partial: index exceeds trusted degree");
  return c_[r] * layout_->factorial_scale(r);
}

Jet Jet::derivative(int var) const {
  if (var < 0 || var >= num_vars())
    throw std::out_of_range("Jet::derivative: var out of range");
  if (valid_ < 1)
    throw std::logic_error("Jet::derivative: no trusted degrees left");
  Jet out(layout_);
  const auto& L = *layout_;
  for (int r = 0; r < L.size(); ++r) {
    const int rb = L.bump(r, var);
    if (rb >= 0) out.c_[r] = c_[rb] * L.exponent(rb, var);
  }
  out.valid_ = valid_ - 1;
  return out;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& v : out.c_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  check_same_shape(*this, o);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_same_shape(*this, o);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_same_shape(a, b);
  Jet out(a.layout_);
  const auto& L = *a.layout_;
  for (int rc = 0; rc < L.size(); ++rc) {
    double acc = 0.0;
    for (const auto& p : L.products_into(rc)) acc += a.c_[p.a] * b.c_[p.b];
    out.c_[rc] = acc;
  }
  out.valid_ = std::min(a.valid_, b.valid_);
  return out;
}

// Triangular recursion for q = a / b: processing result ranks in graded
// order, b0*q_g = a_g - sum_{beta != 0} b_beta q_{g-beta}.
Jet operator/(const Jet& a, const Jet& b) {
  check_same_shape(a, b);
  const double b0 = b.c_[0];
  if (b0 == 0.0 || !std::isfinite(b0))
    throw std::domain_error("jet division: vanishing constant term");
  Jet out(a.layout_);
  const auto& L = *a.layout_;
  out.c_[0] = a.c_[0] / b0;
  for (int rc = 1; rc < L.size(); ++rc) {
    double acc = a.c_[rc];
    for (const auto& p : L.products_into(rc))
      if (p.a != 0) acc -= b.c_[p.a] * out.c_[p.b];
    out.c_[rc] = acc / b0;
  }
  out.valid_ = std::min(a.valid_, b.valid_);
  return out;
}

Jet operator/(double s, const Jet& a) {
  return Jet::constant(s, a.num_vars(), a.max_degree()) / a;
}

// u*u = a, seeded from the constant term: 2*u0*u_g = a_g - sum' u_beta u_delta.
Jet sqrt(const Jet& a) {
  const double a0 = a.c_[0];
  if (!(a0 > 0.0))
    throw std::domain_error("jet sqrt: non-positive constant term");
  Jet out(a.layout_);
  const auto& L = *a.layout_;
  const double u0 = std::sqrt(a0);
  out.c_[0] = u0;
  for (int rc = 1; rc < L.size(); ++rc) {
    double acc = a.c_[rc];
    for (const auto& p : L.products_into(rc))
      if (p.a != 0 && p.b != 0) acc -= out.c_[p.a] * out.c_[p.b];
    out.c_[rc] = acc / (2.0 * u0);
  }
  out.valid_ = a.valid_;
  return out;
}

// log(a) = log(a0) + log(1 + z) with z = a/a0 - 1; z has zero constant term
// so the truncated series terminates at max_degree.
Jet log(const Jet& a) {
  const double a0 = a.c_[0];
  if (!(a0 > 0.0))
    throw std::domain_error("jet log: non-positive constant term");
  Jet z = a / a0;
  z -= 1.0;
  Jet acc = Jet::constant(std::log(a0), a.num_vars(), a.max_degree());
  Jet zp = z;
  for (int k = 1; k <= a.max_degree(); ++k) {
    acc += zp * ((k % 2 ? 1.0 : -1.0) / k);
    if (k < a.max_degree()) zp = zp * z;
  }
  acc.valid_ = std::min(acc.valid_, a.valid_);
  return acc;
}

Jet exp(const Jet& a) {
  const double a0 = a.c_[0];
  Jet z = a;
  z -= a0;
  Jet acc = Jet::constant(std::exp(a0), a.num_vars(), a.max_degree());
  Jet term = acc;
  for (int k = 1; k <= a.max_degree(); ++k) {
    term = term * z / double(k);
    acc += term;
  }
  acc.valid_ = std::min(acc.valid_, a.valid_);
  return acc;
}

Jet pow_int(const Jet& a, int k) {
  if (k < 0) return pow_int(1.0 / a, -k);
  Jet acc = Jet::constant(1.0, a.num_vars(), a.max_degree());
  Jet base = a;
  int e = k;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  if (k > 0) acc.valid_ = std::min(acc.valid_, a.valid_);
  return acc;
}

bool Jet::all_finite() const {
  for (double v : c_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace finsler::jets

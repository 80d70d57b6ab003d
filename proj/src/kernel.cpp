#include "splinestab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "splinestab/errors.hpp"

namespace splinestab {

int multi_index_order(const MultiIndex& beta) {
  return std::accumulate(beta.begin(), beta.end(), 0);
}

SplineOrder::SplineOrder(int m_, int d_) : m(m_), d(d_) {
  if (d < 1) throw Error("spline order: dimension must be >= 1");
  if (m < 1 || 2 * m - d < 1)
    throw Error("spline order: m > d/2 required for a continuous kernel");
}

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

} // namespace

double phi(const SplineOrder& order, double r) {
  if (r < 0) throw Error("phi: radius must be nonnegative");
  const int p = order.power();
  if (!order.log_kernel()) return ipow(r, p);
  return r == 0.0 ? 0.0 : ipow(r, p) * std::log(r);
}

KernelPartial::KernelPartial(const SplineOrder& order, MultiIndex beta)
    : beta_(std::move(beta)) {
  if (static_cast<int>(beta_.size()) != order.d)
    throw Error("phi_partial: multi-index dimension mismatch");
  for (int b : beta_)
    if (b < 0) throw Error("phi_partial: negative multi-index entry");
  if (multi_index_order(beta_) > order.m)
    throw Error("phi_partial: derivative order exceeds m");

  // Seed with phi itself, then differentiate term lists axis by axis.
  // Each term is coeff * x^mono * r^rpow * (log r)^logpow, a family closed
  // under partial differentiation.
  std::vector<Term> terms;
  terms.push_back(Term{1.0, std::vector<int>(order.d, 0), order.power(),
                       order.log_kernel() ? 1 : 0});

  auto differentiate = [&](const std::vector<Term>& in, int axis) {
    std::map<std::pair<std::vector<int>, std::pair<int, int>>, double> acc;
    auto add = [&](std::vector<int> mono, int rpow, int logpow, double c) {
      if (c == 0.0) return;
      acc[{std::move(mono), {rpow, logpow}}] += c;
    };
    for (const Term& t : in) {
      if (t.mono[axis] > 0) {
        auto mono = t.mono;
        mono[axis] -= 1;
        add(std::move(mono), t.rpow, t.logpow, t.coeff * t.mono[axis]);
      }
      if (t.rpow != 0) {
        auto mono = t.mono;
        mono[axis] += 1;
        add(std::move(mono), t.rpow - 2, t.logpow, t.coeff * t.rpow);
      }
      if (t.logpow > 0) {
        auto mono = t.mono;
        mono[axis] += 1;
        add(std::move(mono), t.rpow - 2, t.logpow - 1, t.coeff * t.logpow);
      }
    }
    std::vector<Term> out;
    out.reserve(acc.size());
    for (const auto& [key, c] : acc)
      if (c != 0.0) out.push_back(Term{c, key.first, key.second.first, key.second.second});
    return out;
  };

  for (int axis = 0; axis < order.d; ++axis)
    for (int k = 0; k < beta_[axis]; ++k) terms = differentiate(terms, axis);

  terms_ = std::move(terms);
  for (const Term& t : terms_) {
    const int degree = multi_index_order(t.mono) + t.rpow;
    if (degree < 0 || (degree == 0 && (t.logpow > 0 || multi_index_order(t.mono) > 0)))
      singular_at_origin_ = true;
  }
  // Fully contracted constant terms (x^0 r^0 log^0) only arise for even
  // kernels without log, which do not occur here; treat them as singular to
  // be safe if they ever do.
  for (const Term& t : terms_)
    if (multi_index_order(t.mono) == 0 && t.rpow == 0 && t.logpow == 0 &&
        multi_index_order(beta_) > 0)
      singular_at_origin_ = true;
}

std::optional<double> KernelPartial::operator()(const Vector& x) const {
  const double r = x.norm();
  if (r == 0.0) {
    if (singular_at_origin_) return std::nullopt;
    return 0.0;
  }
  const double logr = std::log(r);
  double sum = 0.0;
  for (const Term& t : terms_) {
    double v = t.coeff;
    for (std::size_t k = 0; k < t.mono.size(); ++k) v *= ipow(x[static_cast<Eigen::Index>(k)], t.mono[k]);
    v *= std::pow(r, t.rpow);
    for (int j = 0; j < t.logpow; ++j) v *= logr;
    sum += v;
  }
  return sum;
}

std::optional<double> phi_partial(const SplineOrder& order, const Vector& x,
                                  const MultiIndex& beta) {
  return KernelPartial(order, beta)(x);
}

int poly_space_dimension(int degree, int dimension) {
  if (degree < 0) return 0;
  // C(degree + dimension, dimension)
  long long num = 1, den = 1;
  for (int i = 1; i <= dimension; ++i) {
    num *= degree + i;
    den *= i;
  }
  return static_cast<int>(num / den);
}

namespace {

void enumerate_exponents(int degree, int dim, std::vector<MultiIndex>& out) {
  // graded lexicographic: total degree ascending, then lexicographic
  MultiIndex cur(dim, 0);
  for (int total = 0; total <= degree; ++total) {
    // enumerate compositions of `total` into dim parts, lexicographic
    std::fill(cur.begin(), cur.end(), 0);
    cur[0] = total;
    for (;;) {
      out.push_back(cur);
      // next composition
      int k = dim - 2;
      while (k >= 0 && cur[k] == 0) --k;
      if (k < 0) break;
      cur[k] -= 1;
      int rest = total;
      for (int i = 0; i <= k; ++i) rest -= cur[i];
      cur[k + 1] = rest;
      for (int i = k + 2; i < dim; ++i) cur[i] = 0;
    }
  }
}

} // namespace

PolyBasis::PolyBasis(int degree, int dimension, Vector center, double scale)
    : degree_(degree), dim_(dimension), center_(std::move(center)), scale_(scale) {
  if (degree_ < 0) throw Error("poly basis: degree must be >= 0");
  if (dim_ < 1) throw Error("poly basis: dimension must be >= 1");
  if (!(scale_ > 0)) throw Error("poly basis: scale must be positive");
  if (center_.size() != dim_) throw Error("poly basis: center dimension mismatch");
  enumerate_exponents(degree_, dim_, exponents_);
}

PolyBasis PolyBasis::for_domain(const Domain& domain, int degree) {
  auto [center, scale] = domain.working_normalization();
  return PolyBasis(degree, domain.dimension(), std::move(center), scale);
}

double PolyBasis::monomial(int j, const Vector& x) const {
  const MultiIndex& e = exponents_[static_cast<std::size_t>(j)];
  double v = 1.0;
  for (int k = 0; k < dim_; ++k) {
    const double t = (x[k] - center_[k]) / scale_;
    for (int p = 0; p < e[static_cast<std::size_t>(k)]; ++p) v *= t;
  }
  return v;
}

double PolyBasis::monomial_partial(int j, const MultiIndex& beta,
                                   const Vector& x) const {
  if (static_cast<int>(beta.size()) != dim_)
    throw Error("poly basis: multi-index dimension mismatch");
  const MultiIndex& e = exponents_[static_cast<std::size_t>(j)];
  double v = 1.0;
  for (int k = 0; k < dim_; ++k) {
    const int a = e[static_cast<std::size_t>(k)], b = beta[static_cast<std::size_t>(k)];
    if (b > a) return 0.0;
    double fall = 1.0;
    for (int i = 0; i < b; ++i) fall *= a - i;
    const double t = (x[k] - center_[k]) / scale_;
    double pw = 1.0;
    for (int p = 0; p < a - b; ++p) pw *= t;
    v *= fall * pw / std::pow(scale_, b);
  }
  return v;
}

double PolyBasis::eval(const Vector& coefficients, const Vector& x) const {
  if (coefficients.size() != size())
    throw Error("poly basis: coefficient length must equal dim Pi_l");
  double sum = 0.0;
  for (int j = 0; j < size(); ++j) sum += coefficients[j] * monomial(j, x);
  return sum;
}

Matrix PolyBasis::vandermonde(const Matrix& points) const {
  if (points.cols() != dim_) throw Error("poly basis: point dimension mismatch");
  Matrix V(points.rows(), size());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector x = points.row(i).transpose();
    for (int j = 0; j < size(); ++j) V(i, j) = monomial(j, x);
  }
  return V;
}

} // namespace splinestab

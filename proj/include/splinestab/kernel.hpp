#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "splinestab/geometry.hpp"

namespace splinestab {

using MultiIndex = std::vector<int>;

int multi_index_order(const MultiIndex& beta);

/// Surface spline order: kernel |x|^(2m-d) for odd d, |x|^(2m-d) log|x| for
/// even d. Requires m > d/2.
struct SplineOrder {
  SplineOrder(int m, int d);
  int m;
  int d;
  int power() const { return 2 * m - d; } // exponent 2m - d
  bool log_kernel() const { return d % 2 == 0; }
  int poly_degree() const { return m - 1; } // degree of the appended space
};

/// Kernel value at radius r >= 0; the even-d case takes the continuous
/// limit 0 at r = 0.
double phi(const SplineOrder& order, double r);

/// Exact closed form of a partial derivative D^beta of phi(|x|), produced by
/// a small symbolic recursion over terms c * x^a * r^k * log(r)^j. Build once
/// per beta, evaluate many times.
class KernelPartial {
public:
  KernelPartial(const SplineOrder& order, MultiIndex beta);

  /// Value at displacement x; nullopt signals a singular point (x = 0 with
  /// derivative order >= 2m - d).
  std::optional<double> operator()(const Vector& x) const;

  const MultiIndex& beta() const { return beta_; }
  /// True if evaluation at x = 0 has no finite limit.
  bool singular_at_origin() const { return singular_at_origin_; }

private:
  struct Term {
    double coeff;
    std::vector<int> mono; // exponents of x
    int rpow;              // power of r = |x|
    int logpow;            // power of log r
  };
  MultiIndex beta_;
  std::vector<Term> terms_;
  bool singular_at_origin_ = false;
};

/// One-shot convenience wrapper around KernelPartial.
std::optional<double> phi_partial(const SplineOrder& order, const Vector& x,
                                  const MultiIndex& beta);

/// dim Pi_l = C(l + d, d).
int poly_space_dimension(int degree, int dimension);

/// Monomial basis of Pi_l in coordinates shifted to `center` and scaled by
/// `scale` (the working ball maps to the unit ball). Exponents are listed in
/// graded lexicographic order with the constant first.
class PolyBasis {
public:
  PolyBasis(int degree, int dimension, Vector center, double scale);
  static PolyBasis for_domain(const Domain& domain, int degree);

  int size() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int dimension() const { return dim_; }
  const Vector& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<MultiIndex>& exponents() const { return exponents_; }

  double monomial(int j, const Vector& x) const;
  /// Exact partial derivative of the j-th normalized monomial.
  double monomial_partial(int j, const MultiIndex& beta, const Vector& x) const;
  double eval(const Vector& coefficients, const Vector& x) const;
  /// Row i, column j = j-th normalized monomial at point i.
  Matrix vandermonde(const Matrix& points) const;

private:
  int degree_, dim_;
  Vector center_;
  double scale_;
  std::vector<MultiIndex> exponents_;
};

} // namespace splinestab

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>

#include "splinestab/geometry.hpp"
#include "splinestab/kernel.hpp"

namespace splinestab {

/// Library-wide interpolation tolerance (relative), surfaced in reports.
inline constexpr double kInterpolationTol = 1e-9;
/// Condition-estimate thresholds for the saddle-point factorization.
inline constexpr double kConditionWarn = 1e10;
inline constexpr double kConditionError = 1e14;

struct UnisolvencyReport {
  bool unisolvent = false;
  int rank = 0;
  int required = 0;
  double threshold = 0; // rank tolerance used
};

/// Numerical rank test of the Pi_degree Vandermonde on the centers.
UnisolvencyReport check_unisolvent(const CenterSet& centers, int degree);

struct FitDiagnostics {
  double condition_estimate = 0;  // 1-norm estimate from the factorization
  double max_residual = 0;        // max |s(xi) - data| / data scale
  double side_condition_residual = 0;
  bool tolerance_met = false;     // residuals within kInterpolationTol
  bool condition_warning = false; // condition estimate above kConditionWarn
};

/// Element of S_Xi: kernel coefficients over the centers plus a polynomial
/// of degree m-1 in the normalized basis.
class Interpolant {
public:
  Interpolant(SplineOrder order, Matrix centers, Vector kernel_coeffs,
              PolyBasis basis, Vector poly_coeffs, FitDiagnostics diagnostics);

  const SplineOrder& order() const { return order_; }
  const Matrix& centers() const { return centers_; }
  const Vector& kernel_coefficients() const { return kernel_coeffs_; }
  const PolyBasis& poly_basis() const { return basis_; }
  const Vector& poly_coefficients() const { return poly_coeffs_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

  double evaluate(const Vector& x) const;
  /// Batch evaluation; identical to the pointwise loop bit for bit.
  Vector evaluate(const Matrix& points) const;

  /// D^beta at x using precompiled kernel partials. nullopt at singular
  /// points (centers, when the derivative order reaches 2m - d).
  std::optional<double> partial(const MultiIndex& beta, const Vector& x) const;
  /// Compiled partial for repeated evaluation at fixed beta.
  class PartialEvaluator {
  public:
    PartialEvaluator(const Interpolant& s, MultiIndex beta);
    std::optional<double> operator()(const Vector& x) const;

  private:
    const Interpolant* s_;
    MultiIndex beta_;
    KernelPartial kernel_partial_;
    double scale_pow_;
  };
  PartialEvaluator partial_evaluator(const MultiIndex& beta) const;

  /// Text record (d, m, centers, coefficients, normalization); exact
  /// round-trip at 17 significant digits.
  void write(std::ostream& out) const;
  static Interpolant read(std::istream& in);

private:
  SplineOrder order_;
  Matrix centers_;
  Vector kernel_coeffs_;
  PolyBasis basis_;
  Vector poly_coeffs_;
  FitDiagnostics diagnostics_;
};

/// Solves the bordered conditionally-positive-definite system for the
/// interpolant of `data` on the centers. Throws UnisolvencyError if the
/// centers cannot support Pi_{m-1}, IllConditionedError when the condition
/// estimate exceeds kConditionError.
Interpolant fit(const CenterSet& centers, const Vector& data,
                const SplineOrder& order);

/// All Lagrange functions of a center set from a single factorization.
class LagrangeBasis {
public:
  LagrangeBasis(const CenterSet& centers, const SplineOrder& order);

  int size() const { return static_cast<int>(centers_.size()); }
  const CenterSet& centers() const { return centers_; }
  const SplineOrder& order() const { return order_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

  /// chi_{xi_i} as a standalone interpolant.
  Interpolant column(int i) const;
  double evaluate(int i, const Vector& x) const;
  /// All Lagrange values at one point.
  Vector evaluate_all(const Vector& x) const;
  /// Rows = points, columns = centers. Deterministic for any thread count.
  Matrix evaluate_all(const Matrix& points) const;

  /// max |chi_i(xi_j) - delta_ij| over all pairs.
  double kronecker_defect() const;

private:
  CenterSet centers_;
  SplineOrder order_;
  PolyBasis basis_;
  Matrix coefficients_; // (n + q) x n, column i = [A; c] of chi_i
  FitDiagnostics diagnostics_;
};

/// Kernel-block quadratic form of the interpolant, signed so that it is
/// nonnegative on the side-condition subspace. Proportional to the squared
/// order-m Sobolev seminorm with an (m,d)-dependent positive constant.
/// Throws if the side conditions are violated beyond tolerance.
double native_energy(const Interpolant& s);

} // namespace splinestab

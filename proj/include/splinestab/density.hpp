#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <variant>
#include <vector>

#include "splinestab/geometry.hpp"
#include "splinestab/kernel.hpp"

namespace splinestab {

/// Default stability budget when the caller has no opinion: 4 * dim Pi_l.
double default_stability_budget(int degree, int dimension);

/// Local polynomial reproduction: sparse weights over the centers captured
/// by B(alpha, radius) reproducing every p in Pi_l at alpha.
struct ReproductionWitness {
  Vector alpha;
  double radius = 0;
  int precision = 0;                                // l
  std::vector<std::pair<int, double>> coefficients; // (center index, a)
  double stability = 0;                             // sum |a|
  double precision_residual = 0;                    // max constraint defect
};

struct ReproductionInfeasible {
  enum class Reason { NoCapture, NotUnisolvent, Precision, Stability };
  Reason reason;
  double detail = 0; // achieved stability for Reason::Stability
};

using ReproductionResult = std::variant<ReproductionWitness, ReproductionInfeasible>;

/// Minimum-l2-norm coefficients for the captured subset, checked against the
/// stability budget K. Infeasibility is a value, not an error.
ReproductionResult local_reproduction(const CenterSet& centers, const Vector& alpha,
                                      int degree, double stability_budget,
                                      double radius);

struct DensityDiagnostics {
  double eps_star = 0;     // largest slow-growth epsilon passing (bisected)
  double tau = 0;          // 1/eps_star - 1
  double c_sm = 0;         // fitted self-majorization constant at tau
  double c0 = 0;           // weak quasi-uniformity ratio max rho(xi)/q(xi)
  int c0_argmax = -1;
  int diagnostic_points = 0; // size of the pair-checked subsample
  int diagnostic_stride = 1;
};

/// Local density parameter rho on a designated point list (the centers
/// followed by any extra probe points), with per-point witnesses.
class DensityField {
public:
  DensityField(CenterSet centers, int degree, double stability_budget,
               Matrix points, Vector rho, std::vector<ReproductionWitness> witnesses,
               DensityDiagnostics diagnostics);

  const CenterSet& centers() const { return centers_; }
  int precision() const { return degree_; }
  double stability_budget() const { return budget_; }

  /// All evaluation points: rows 0..n_centers-1 are the centers.
  const Matrix& points() const { return points_; }
  int n_centers() const { return centers_.size(); }
  int n_extra() const { return static_cast<int>(points_.rows()) - n_centers(); }

  double rho(int i) const { return rho_[i]; }
  const Vector& rho_values() const { return rho_; }
  double rho_at_center(int i) const { return rho_[i]; }
  double rho_at_extra(int i) const { return rho_[n_centers() + i]; }
  double max_rho() const { return rho_.maxCoeff(); }

  const ReproductionWitness& witness(int i) const { return witnesses_[static_cast<std::size_t>(i)]; }
  const DensityDiagnostics& diagnostics() const { return diagnostics_; }

  /// Text table (coordinates, rho, witness radius, stability) followed by a
  /// diagnostics block.
  void write(std::ostream& out) const;

private:
  CenterSet centers_;
  int degree_;
  double budget_;
  Matrix points_;
  Vector rho_;
  std::vector<ReproductionWitness> witnesses_;
  DensityDiagnostics diagnostics_;
};

/// rho(alpha) = smallest candidate radius (sorted center distances, inflated
/// by 1e-9 relative) at which the captured set is Pi_degree-unisolvent and a
/// budget-feasible reproduction exists. Throws if some point has no feasible
/// radius up to r1.
DensityField density_field(const CenterSet& centers, int degree,
                           double stability_budget,
                           const Matrix& extra_points = Matrix(0, 0));

struct GrowthCheck {
  bool pass = true;
  std::vector<std::pair<int, int>> violations; // capped at 100 pairs
  double fitted = 0;                           // eps* or C_sm*
};

/// Verifies rho(alpha) <= rho(x) (1 + |x-alpha|/rho(x))^(1-eps) over all
/// ordered pairs of the stored list; also reports the largest passing eps.
GrowthCheck check_slow_growth(const DensityField& field, double eps);

/// Verifies rho(y) >= c_sm rho(x) (1 + |x-y|/rho(x))^(-tau); fitted value is
/// the largest C_sm passing at this tau.
GrowthCheck check_self_majorization(const DensityField& field, double tau,
                                    double c_sm);

/// c0 = max over centers rho(xi)/q(xi), with the attaining center.
std::pair<double, int> weak_quasi_uniformity(const DensityField& field);

struct NormingEstimate {
  double kappa_hat = 0;
  bool unisolvent = false;
  int grid_resolution = 0;
};

/// Sampled lower bound for the norming constant of `points` in the ball:
/// max over random polynomials and Chebyshev-extremal candidates of
/// sup_B |p| / max_points |p|. d <= 2.
NormingEstimate estimate_norming_constant(const Matrix& points, const Region& ball,
                                          int degree, int trials, std::uint64_t seed,
                                          int grid_resolution = 129);

/// Worst kappa over single-point removals, at degree-1 precision.
NormingEstimate estimate_norming_constant_leave_one_out(
    const Matrix& points, const Region& ball, int degree, int trials,
    std::uint64_t seed, int grid_resolution = 129);

} // namespace splinestab

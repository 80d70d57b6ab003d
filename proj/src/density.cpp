#include "splinestab/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "splinestab/errors.hpp"
#include "splinestab/parallel.hpp"
#include "splinestab/random.hpp"
#include "splinestab/text_io.hpp"

namespace splinestab {

namespace {

constexpr double kRadiusInflation = 1e-9;
constexpr double kPrecisionTol = 1e-9;
constexpr double kRankThreshold = 1e-10;

std::string point_string(const Vector& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << ')';
  return os.str();
}

// Min-l2-norm reproduction over an explicit captured subset. `captured`
// holds global center indices ordered by distance from alpha.
ReproductionResult solve_reproduction(const Matrix& centers,
                                      const std::vector<int>& captured,
                                      const Vector& alpha, int degree,
                                      double stability_budget, double radius) {
  const int d = static_cast<int>(centers.cols());
  const int q = poly_space_dimension(degree, d);
  const int s = static_cast<int>(captured.size());
  if (s == 0)
    return ReproductionInfeasible{ReproductionInfeasible::Reason::NoCapture, 0};
  if (s < q)
    return ReproductionInfeasible{ReproductionInfeasible::Reason::NotUnisolvent, 0};

  PolyBasis basis(degree, d, alpha, radius);
  Matrix pts(s, d);
  for (int i = 0; i < s; ++i) pts.row(i) = centers.row(captured[static_cast<std::size_t>(i)]);
  const Matrix v = basis.vandermonde(pts); // s x q

  // In the normalized basis the target values are e_0 (monomials vanish at
  // alpha except the constant).
  Vector target = Vector::Zero(q);
  target[0] = 1.0;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(v.transpose());
  cod.setThreshold(kRankThreshold);
  if (static_cast<int>(cod.rank()) < q)
    return ReproductionInfeasible{ReproductionInfeasible::Reason::NotUnisolvent, 0};
  const Vector a = cod.solve(target);

  const double resid = (v.transpose() * a - target).cwiseAbs().maxCoeff();
  if (resid > kPrecisionTol)
    return ReproductionInfeasible{ReproductionInfeasible::Reason::Precision, resid};
  const double stability = a.cwiseAbs().sum();
  if (stability > stability_budget)
    return ReproductionInfeasible{ReproductionInfeasible::Reason::Stability, stability};

  ReproductionWitness w;
  w.alpha = alpha;
  w.radius = radius;
  w.precision = degree;
  w.stability = stability;
  w.precision_residual = resid;
  w.coefficients.reserve(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i)
    w.coefficients.emplace_back(captured[static_cast<std::size_t>(i)], a[i]);
  return w;
}

struct RadiusSearch {
  double rho = 0;
  ReproductionWitness witness;
  bool ok = false;
};

RadiusSearch search_minimal_radius(const CenterSet& centers, const Vector& alpha,
                                   int degree, double budget) {
  const Matrix& pts = centers.points();
  const int n = centers.size();
  const double r1 = centers.domain().diameter();
  const int q = poly_space_dimension(degree, centers.dimension());

  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    dist[static_cast<std::size_t>(i)] = {(pts.row(i) - alpha.transpose()).norm(), i};
  std::sort(dist.begin(), dist.end());

  RadiusSearch out;
  int prev_capture = -1;
  for (int k = 0; k < n; ++k) {
    const double dk = dist[static_cast<std::size_t>(k)].first;
    const double radius = dk > 0 ? dk * (1 + kRadiusInflation) : 1e-12 * r1;
    int capture = k + 1;
    while (capture < n && dist[static_cast<std::size_t>(capture)].first <= radius) ++capture;
    if (capture == prev_capture) continue;
    prev_capture = capture;
    if (capture < q) continue;

    std::vector<int> captured(static_cast<std::size_t>(capture));
    for (int i = 0; i < capture; ++i) captured[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
    auto res = solve_reproduction(pts, captured, alpha, degree, budget, radius);
    if (auto* w = std::get_if<ReproductionWitness>(&res)) {
      out.rho = radius;
      out.witness = std::move(*w);
      out.ok = true;
      return out;
    }
  }
  return out;
}

bool pass_slow_growth(const Vector& rho, const Matrix& pts,
                      const std::vector<int>& idx, double eps) {
  const double slack = 1 + 1e-12;
  for (int i : idx)
    for (int j : idx) {
      if (i == j) continue;
      const double dist = (pts.row(i) - pts.row(j)).norm();
      const double rhs = rho[i] * std::pow(1.0 + dist / rho[i], 1.0 - eps);
      if (rho[j] > rhs * slack) return false;
    }
  return true;
}

double fit_eps_star(const Vector& rho, const Matrix& pts,
                    const std::vector<int>& idx) {
  if (pass_slow_growth(rho, pts, idx, 1.0)) return 1.0;
  if (!pass_slow_growth(rho, pts, idx, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0; // pass(lo), fail(hi)
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (pass_slow_growth(rho, pts, idx, mid) ? lo : hi) = mid;
  }
  return lo;
}

double fit_c_sm(const Vector& rho, const Matrix& pts, const std::vector<int>& idx,
                double tau) {
  double c = 1.0;
  for (int i : idx)
    for (int j : idx) {
      if (i == j) continue;
      const double dist = (pts.row(i) - pts.row(j)).norm();
      const double denom = rho[i] * std::pow(1.0 + dist / rho[i], -tau);
      c = std::min(c, rho[j] / denom);
    }
  return c;
}

} // namespace

double default_stability_budget(int degree, int dimension) {
  return 4.0 * poly_space_dimension(degree, dimension);
}

ReproductionResult local_reproduction(const CenterSet& centers, const Vector& alpha,
                                      int degree, double stability_budget,
                                      double radius) {
  if (!(radius > 0)) throw Error("local reproduction: radius must be positive");
  if (alpha.size() != centers.dimension())
    throw Error("local reproduction: point dimension mismatch");
  std::vector<int> captured;
  for (int i = 0; i < centers.size(); ++i)
    if ((centers.points().row(i) - alpha.transpose()).norm() <= radius)
      captured.push_back(i);
  return solve_reproduction(centers.points(), captured, alpha, degree,
                            stability_budget, radius);
}

DensityField::DensityField(CenterSet centers, int degree, double stability_budget,
                           Matrix points, Vector rho,
                           std::vector<ReproductionWitness> witnesses,
                           DensityDiagnostics diagnostics)
    : centers_(std::move(centers)), degree_(degree), budget_(stability_budget),
      points_(std::move(points)), rho_(std::move(rho)),
      witnesses_(std::move(witnesses)), diagnostics_(diagnostics) {}

DensityField density_field(const CenterSet& centers, int degree,
                           double stability_budget, const Matrix& extra_points) {
  if (degree < 0) throw Error("density field: degree must be >= 0");
  if (!(stability_budget > 0)) throw Error("density field: K must be positive");
  const int n = centers.size();
  const int n_extra = static_cast<int>(extra_points.rows());
  if (n_extra > 0 && extra_points.cols() != centers.dimension())
    throw Error("density field: probe point dimension mismatch");

  Matrix points(n + n_extra, centers.dimension());
  points.topRows(n) = centers.points();
  if (n_extra > 0) points.bottomRows(n_extra) = extra_points;

  Vector rho(points.rows());
  std::vector<ReproductionWitness> witnesses(static_cast<std::size_t>(points.rows()));
  std::vector<std::string> failures(static_cast<std::size_t>(points.rows()));

  parallel_blocks(static_cast<std::size_t>(points.rows()), 64,
                  [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t i = lo; i < hi; ++i) {
                      const Vector alpha =
                          points.row(static_cast<Eigen::Index>(i)).transpose();
                      auto res = search_minimal_radius(centers, alpha, degree,
                                                       stability_budget);
                      if (!res.ok) {
                        failures[i] = point_string(alpha);
                        continue;
                      }
                      rho[static_cast<Eigen::Index>(i)] = res.rho;
                      witnesses[i] = std::move(res.witness);
                    }
                  });
  for (const auto& f : failures)
    if (!f.empty())
      throw NumericalError("density field: no feasible radius up to r1 at " + f);

  DensityDiagnostics diag;
  const int total = static_cast<int>(points.rows());
  const int cap = 2048;
  diag.diagnostic_stride = std::max(1, (total + cap - 1) / cap);
  std::vector<int> idx;
  for (int i = 0; i < total; i += diag.diagnostic_stride) idx.push_back(i);
  diag.diagnostic_points = static_cast<int>(idx.size());
  diag.eps_star = fit_eps_star(rho, points, idx);
  diag.tau = diag.eps_star > 0 ? 1.0 / diag.eps_star - 1.0 : 0.0;
  diag.c_sm = diag.eps_star > 0 ? fit_c_sm(rho, points, idx, diag.tau) : 0.0;
  if (n >= 2) {
    const Vector q = separation(centers);
    diag.c0 = 0;
    diag.c0_argmax = 0;
    for (int i = 0; i < n; ++i) {
      const double ratio = rho[i] / q[i];
      if (ratio > diag.c0) {
        diag.c0 = ratio;
        diag.c0_argmax = i;
      }
    }
  } else {
    diag.c0 = std::numeric_limits<double>::quiet_NaN();
    diag.c0_argmax = -1;
  }

  return DensityField(centers, degree, stability_budget, std::move(points),
                      std::move(rho), std::move(witnesses), diag);
}

GrowthCheck check_slow_growth(const DensityField& field, double eps) {
  if (field.points().rows() < 2)
    throw Error("slow growth check needs at least two points");
  if (!(eps > 0 && eps <= 1)) throw Error("slow growth: eps must lie in (0,1]");
  GrowthCheck out;
  const Matrix& pts = field.points();
  const Vector& rho = field.rho_values();
  const int n = static_cast<int>(pts.rows());
  const double slack = 1 + 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dist = (pts.row(i) - pts.row(j)).norm();
      const double rhs = rho[i] * std::pow(1.0 + dist / rho[i], 1.0 - eps);
      if (rho[j] > rhs * slack) {
        out.pass = false;
        if (out.violations.size() < 100) out.violations.emplace_back(i, j);
      }
    }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  out.fitted = fit_eps_star(rho, pts, all);
  return out;
}

GrowthCheck check_self_majorization(const DensityField& field, double tau,
                                    double c_sm) {
  if (field.points().rows() < 2)
    throw Error("self-majorization check needs at least two points");
  if (tau < 0) throw Error("self-majorization: tau must be >= 0");
  GrowthCheck out;
  const Matrix& pts = field.points();
  const Vector& rho = field.rho_values();
  const int n = static_cast<int>(pts.rows());
  const double slack = 1 - 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dist = (pts.row(i) - pts.row(j)).norm();
      const double rhs = c_sm * rho[i] * std::pow(1.0 + dist / rho[i], -tau);
      if (rho[j] < rhs * slack) {
        out.pass = false;
        if (out.violations.size() < 100) out.violations.emplace_back(i, j);
      }
    }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  out.fitted = fit_c_sm(rho, pts, all, tau);
  return out;
}

std::pair<double, int> weak_quasi_uniformity(const DensityField& field) {
  const Vector q = separation(field.centers());
  double c0 = 0;
  int argmax = 0;
  for (int i = 0; i < field.n_centers(); ++i) {
    const double ratio = field.rho_at_center(i) / q[i];
    if (ratio > c0) {
      c0 = ratio;
      argmax = i;
    }
  }
  return {c0, argmax};
}

void DensityField::write(std::ostream& out) const {
  out << "# splinestab density field\n";
  out << "# precision " << degree_ << " stability_budget " << format_g17(budget_)
      << "\n";
  out << "# columns: coordinates[" << points_.cols()
      << "], rho, witness_radius, stability\n";
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < points_.cols(); ++k) row.push_back(points_(i, k));
    row.push_back(rho_[i]);
    row.push_back(witnesses_[static_cast<std::size_t>(i)].radius);
    row.push_back(witnesses_[static_cast<std::size_t>(i)].stability);
    out << csv_row(row) << "\n";
  }
  out << "# diagnostics eps_star " << format_g17(diagnostics_.eps_star) << " tau "
      << format_g17(diagnostics_.tau) << " c_sm " << format_g17(diagnostics_.c_sm)
      << " c0 " << format_g17(diagnostics_.c0) << " pairs_points "
      << diagnostics_.diagnostic_points << " stride "
      << diagnostics_.diagnostic_stride << "\n";
}

namespace {

Matrix ball_grid(const Region& ball, int resolution) {
  const int d = static_cast<int>(ball.center.size());
  if (d > 2) throw Error("norming estimate: unsupported dimension (d <= 2)");
  if (d == 1) {
    Matrix g(resolution, 1);
    for (int i = 0; i < resolution; ++i)
      g(i, 0) = ball.center[0] - ball.radius +
                2 * ball.radius * i / (resolution - 1);
    return g;
  }
  std::vector<Vector> rows;
  Vector x(2);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      x[0] = ball.center[0] - ball.radius + 2 * ball.radius * i / (resolution - 1);
      x[1] = ball.center[1] - ball.radius + 2 * ball.radius * j / (resolution - 1);
      if ((x - ball.center).norm() <= ball.radius) rows.push_back(x);
    }
  Matrix g(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t r = 0; r < rows.size(); ++r) g.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return g;
}

// Lawson iteration for the Chebyshev problem: minimize max_i |p(xi_i)|
// subject to p(y) = 1. Returns basis coefficients.
Vector lawson_extremal(const Matrix& v_pts, const Eigen::RowVectorXd& v_y) {
  const int s = static_cast<int>(v_pts.rows());
  const int q = static_cast<int>(v_pts.cols());
  Vector w = Vector::Constant(s, 1.0 / s);
  Vector coef = Vector::Zero(q);
  for (int iter = 0; iter < 60; ++iter) {
    Matrix g = Matrix::Zero(q, q);
    for (int i = 0; i < s; ++i)
      g.noalias() += w[i] * v_pts.row(i).transpose() * v_pts.row(i);
    g.diagonal().array() += 1e-13 * (g.trace() + 1.0);
    Eigen::LDLT<Matrix> ldlt(g);
    const Vector ginv_c = ldlt.solve(v_y.transpose());
    const double denom = v_y.dot(ginv_c);
    if (denom == 0 || !std::isfinite(denom)) break;
    coef = ginv_c / denom;
    Vector absvals = (v_pts * coef).cwiseAbs();
    const double total = (w.array() * absvals.array()).sum();
    if (total <= 0) break;
    w = (w.array() * absvals.array()) / total;
  }
  return coef;
}

NormingEstimate norming_core(const Matrix& points, const Region& ball, int degree,
                             int trials, std::uint64_t seed, int grid_resolution) {
  if (ball.kind != Region::Kind::Ball)
    throw Error("norming estimate: region must be a ball");
  const int d = static_cast<int>(points.cols());
  const int q = poly_space_dimension(degree, d);
  PolyBasis basis(degree, d, ball.center, ball.radius);

  NormingEstimate out;
  out.grid_resolution = grid_resolution;

  const Matrix v_pts = basis.vandermonde(points);
  Eigen::ColPivHouseholderQR<Matrix> qr(v_pts);
  qr.setThreshold(kRankThreshold);
  if (static_cast<int>(qr.rank()) < q) {
    out.unisolvent = false;
    out.kappa_hat = std::numeric_limits<double>::infinity();
    return out;
  }
  out.unisolvent = true;

  const Matrix grid = ball_grid(ball, grid_resolution);
  const Matrix v_grid = basis.vandermonde(grid);

  auto kappa_of = [&](const Vector& coef) {
    const double on_points = (v_pts * coef).cwiseAbs().maxCoeff();
    const double on_grid = (v_grid * coef).cwiseAbs().maxCoeff();
    if (on_points <= 0) return std::numeric_limits<double>::infinity();
    return on_grid / on_points;
  };

  double best = 0;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    Vector coef(q);
    for (int j = 0; j < q; ++j) coef[j] = normal01(rng);
    best = std::max(best, kappa_of(coef));
  }

  // Chebyshev-extremal candidates anchored at a coarse grid.
  const int coarse_res = std::min(grid_resolution, 33);
  const Matrix coarse = ball_grid(ball, coarse_res);
  for (Eigen::Index i = 0; i < coarse.rows(); ++i) {
    const Vector y = coarse.row(i).transpose();
    Eigen::RowVectorXd v_y(q);
    for (int j = 0; j < q; ++j) v_y[j] = basis.monomial(j, y);
    const Vector coef = lawson_extremal(v_pts, v_y);
    if (coef.cwiseAbs().maxCoeff() > 0) best = std::max(best, kappa_of(coef));
  }
  out.kappa_hat = best;
  return out;
}

} // namespace

NormingEstimate estimate_norming_constant(const Matrix& points, const Region& ball,
                                          int degree, int trials, std::uint64_t seed,
                                          int grid_resolution) {
  return norming_core(points, ball, degree, trials, seed, grid_resolution);
}

NormingEstimate estimate_norming_constant_leave_one_out(
    const Matrix& points, const Region& ball, int degree, int trials,
    std::uint64_t seed, int grid_resolution) {
  if (degree < 1)
    throw Error("leave-one-out norming estimate needs degree >= 1");
  NormingEstimate worst;
  worst.unisolvent = true;
  worst.grid_resolution = grid_resolution;
  for (Eigen::Index drop = 0; drop < points.rows(); ++drop) {
    Matrix sub(points.rows() - 1, points.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      if (i != drop) sub.row(r++) = points.row(i);
    const auto est = norming_core(sub, ball, degree - 1, trials, seed, grid_resolution);
    worst.unisolvent = worst.unisolvent && est.unisolvent;
    worst.kappa_hat = std::max(worst.kappa_hat, est.kappa_hat);
  }
  return worst;
}

} // namespace splinestab

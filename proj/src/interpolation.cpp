#include "splinestab/interpolation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <lapacke.h>
#include <ostream>
#include <sstream>

#include "splinestab/errors.hpp"
#include "splinestab/parallel.hpp"
#include "splinestab/text_io.hpp"

namespace splinestab {

namespace {

constexpr double kRankThreshold = 1e-10;

// Bunch-Kaufman factorization of the bordered symmetric-indefinite system,
// with a 1-norm condition estimate from the factorization.
class SymmetricIndefiniteSolver {
public:
  explicit SymmetricIndefiniteSolver(Matrix m) : a_(std::move(m)) {
    const lapack_int n = static_cast<lapack_int>(a_.rows());
    ipiv_.resize(n);
    const double anorm =
        LAPACKE_dlansy(LAPACK_COL_MAJOR, '1', 'L', n, a_.data(), n);
    lapack_int info =
        LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, a_.data(), n, ipiv_.data());
    if (info != 0)
      throw IllConditionedError("saddle-system factorization failed (zero pivot)",
                                std::numeric_limits<double>::infinity());
    double rcond = 0;
    info = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', n, a_.data(), n, ipiv_.data(),
                          anorm, &rcond);
    if (info != 0) throw NumericalError("condition estimation failed");
    condition_ = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  }

  double condition_estimate() const { return condition_; }

  Matrix solve(Matrix rhs) const {
    const lapack_int n = static_cast<lapack_int>(a_.rows());
    const lapack_int nrhs = static_cast<lapack_int>(rhs.cols());
    lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, nrhs, a_.data(), n,
                                     ipiv_.data(), rhs.data(), n);
    if (info != 0) throw NumericalError("saddle-system solve failed");
    return rhs;
  }

private:
  Matrix a_;
  std::vector<lapack_int> ipiv_;
  double condition_;
};

struct Assembled {
  Matrix system;   // (n+q) x (n+q) bordered matrix
  PolyBasis basis; // normalized polynomial basis
  Matrix normalized_points;
};

Assembled assemble(const CenterSet& centers, const SplineOrder& order) {
  if (centers.dimension() != order.d)
    throw Error("fit: center dimension does not match spline order");
  PolyBasis basis = PolyBasis::for_domain(centers.domain(), order.poly_degree());
  const int n = centers.size();
  const int q = basis.size();
  const auto [c, s] = centers.domain().working_normalization();

  Matrix y(n, order.d);
  for (int i = 0; i < n; ++i)
    y.row(i) = (centers.points().row(i) - c.transpose()) / s;

  Matrix m = Matrix::Zero(n + q, n + q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = phi(order, (y.row(i) - y.row(j)).norm());
      m(i, j) = v;
      m(j, i) = v;
    }
  const Matrix p = basis.vandermonde(centers.points());
  m.block(0, n, n, q) = p;
  m.block(n, 0, q, n) = p.transpose();
  return {std::move(m), std::move(basis), std::move(y)};
}

FitDiagnostics make_diagnostics(const Matrix& system, const Matrix& z,
                                const Matrix& rhs, int n, double condition,
                                double data_scale) {
  FitDiagnostics diag;
  diag.condition_estimate = condition;
  const Matrix resid = system * z - rhs;
  diag.max_residual =
      resid.topRows(n).cwiseAbs().maxCoeff() / (data_scale > 0 ? data_scale : 1.0);
  double a_scale = z.topRows(n).cwiseAbs().colwise().sum().maxCoeff();
  diag.side_condition_residual =
      resid.bottomRows(resid.rows() - n).cwiseAbs().maxCoeff() /
      (a_scale > 0 ? a_scale : 1.0);
  diag.tolerance_met = diag.max_residual <= kInterpolationTol &&
                       diag.side_condition_residual <= kInterpolationTol;
  diag.condition_warning = condition > kConditionWarn;
  return diag;
}

} // namespace

UnisolvencyReport check_unisolvent(const CenterSet& centers, int degree) {
  PolyBasis basis = PolyBasis::for_domain(centers.domain(), degree);
  const Matrix v = basis.vandermonde(centers.points());
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  qr.setThreshold(kRankThreshold);
  UnisolvencyReport rep;
  rep.rank = static_cast<int>(qr.rank());
  rep.required = basis.size();
  rep.threshold = kRankThreshold;
  rep.unisolvent = rep.rank == rep.required;
  return rep;
}

Interpolant::Interpolant(SplineOrder order, Matrix centers, Vector kernel_coeffs,
                         PolyBasis basis, Vector poly_coeffs,
                         FitDiagnostics diagnostics)
    : order_(order), centers_(std::move(centers)),
      kernel_coeffs_(std::move(kernel_coeffs)), basis_(std::move(basis)),
      poly_coeffs_(std::move(poly_coeffs)), diagnostics_(diagnostics) {
  if (centers_.rows() != kernel_coeffs_.size())
    throw Error("interpolant: kernel coefficient count mismatch");
  if (basis_.size() != poly_coeffs_.size())
    throw Error("interpolant: polynomial coefficient count mismatch");
}

double Interpolant::evaluate(const Vector& x) const {
  const Vector& c = basis_.center();
  const double s = basis_.scale();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
    const double r = ((x - centers_.row(i).transpose()) / s).norm();
    sum += kernel_coeffs_[i] * phi(order_, r);
  }
  for (int j = 0; j < basis_.size(); ++j)
    sum += poly_coeffs_[j] * basis_.monomial(j, x);
  (void)c;
  return sum;
}

Vector Interpolant::evaluate(const Matrix& points) const {
  Vector out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector x = points.row(i).transpose();
    out[i] = evaluate(x);
  }
  return out;
}

Interpolant::PartialEvaluator::PartialEvaluator(const Interpolant& s, MultiIndex beta)
    : s_(&s), beta_(std::move(beta)), kernel_partial_(s.order(), beta_),
      scale_pow_(std::pow(s.poly_basis().scale(),
                          -multi_index_order(beta_))) {}

std::optional<double> Interpolant::PartialEvaluator::operator()(const Vector& x) const {
  const double scale = s_->poly_basis().scale();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s_->centers_.rows(); ++i) {
    const Vector disp = (x - s_->centers_.row(i).transpose()) / scale;
    const auto v = kernel_partial_(disp);
    if (!v) return std::nullopt;
    sum += s_->kernel_coeffs_[i] * *v;
  }
  sum *= scale_pow_;
  for (int j = 0; j < s_->basis_.size(); ++j)
    sum += s_->poly_coeffs_[j] * s_->basis_.monomial_partial(j, beta_, x);
  return sum;
}

Interpolant::PartialEvaluator
Interpolant::partial_evaluator(const MultiIndex& beta) const {
  return PartialEvaluator(*this, beta);
}

std::optional<double> Interpolant::partial(const MultiIndex& beta,
                                           const Vector& x) const {
  return PartialEvaluator(*this, beta)(x);
}

void Interpolant::write(std::ostream& out) const {
  out << "splinestab-interpolant 1\n";
  out << "d " << order_.d << "\n";
  out << "m " << order_.m << "\n";
  out << "n " << centers_.rows() << "\n";
  out << "center";
  for (Eigen::Index k = 0; k < basis_.center().size(); ++k)
    out << ' ' << format_g17(basis_.center()[k]);
  out << "\nscale " << format_g17(basis_.scale()) << "\n";
  out << "points\n";
  write_points(out, centers_);
  out << "kernel_coefficients\n";
  for (Eigen::Index i = 0; i < kernel_coeffs_.size(); ++i)
    out << format_g17(kernel_coeffs_[i]) << "\n";
  out << "poly_coefficients\n";
  for (Eigen::Index i = 0; i < poly_coeffs_.size(); ++i)
    out << format_g17(poly_coeffs_[i]) << "\n";
}

Interpolant Interpolant::read(std::istream& in) {
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != "splinestab-interpolant" || version != 1)
    throw IoError("not a splinestab interpolant record");
  auto expect = [&](const std::string& name) {
    std::string t;
    in >> t;
    if (t != name) throw IoError("interpolant record: expected '" + name + "'");
  };
  int d = 0, m = 0;
  Eigen::Index n = 0;
  expect("d");
  in >> d;
  expect("m");
  in >> m;
  expect("n");
  in >> n;
  if (!in || d < 1 || m < 1 || n < 1) throw IoError("interpolant record: bad header");
  expect("center");
  Vector center(d);
  for (int k = 0; k < d; ++k) in >> center[k];
  expect("scale");
  double scale = 0;
  in >> scale;
  expect("points");
  Matrix pts(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) in >> pts(i, k);
  expect("kernel_coefficients");
  Vector a(n);
  for (Eigen::Index i = 0; i < n; ++i) in >> a[i];
  SplineOrder order(m, d);
  PolyBasis basis(order.poly_degree(), d, center, scale);
  expect("poly_coefficients");
  Vector c(basis.size());
  for (int i = 0; i < basis.size(); ++i) in >> c[i];
  if (!in) throw IoError("interpolant record: truncated");
  return Interpolant(order, std::move(pts), std::move(a), std::move(basis),
                     std::move(c), FitDiagnostics{});
}

Interpolant fit(const CenterSet& centers, const Vector& data,
                const SplineOrder& order) {
  if (data.size() != centers.size())
    throw Error("fit: data length must equal the number of centers");
  const auto uni = check_unisolvent(centers, order.poly_degree());
  if (!uni.unisolvent)
    throw UnisolvencyError("centers are not unisolvent for degree " +
                           std::to_string(order.poly_degree()) + " (rank " +
                           std::to_string(uni.rank) + " of " +
                           std::to_string(uni.required) + ")");

  Assembled asm_ = assemble(centers, order);
  const int n = centers.size();
  const int q = asm_.basis.size();
  SymmetricIndefiniteSolver solver(asm_.system);
  if (solver.condition_estimate() > kConditionError)
    throw IllConditionedError("saddle system condition estimate " +
                                  format_g17(solver.condition_estimate()) +
                                  " exceeds limit",
                              solver.condition_estimate());

  Matrix rhs = Matrix::Zero(n + q, 1);
  rhs.topRows(n) = data;
  const Matrix z = solver.solve(rhs);
  const double data_scale = data.size() ? data.cwiseAbs().maxCoeff() : 0.0;
  FitDiagnostics diag = make_diagnostics(asm_.system, z, rhs, n,
                                         solver.condition_estimate(), data_scale);
  return Interpolant(order, centers.points(), z.col(0).head(n),
                     std::move(asm_.basis), z.col(0).tail(q), diag);
}

LagrangeBasis::LagrangeBasis(const CenterSet& centers, const SplineOrder& order)
    : centers_(centers), order_(order),
      basis_(PolyBasis::for_domain(centers.domain(), order.poly_degree())) {
  const auto uni = check_unisolvent(centers, order.poly_degree());
  if (!uni.unisolvent)
    throw UnisolvencyError("centers are not unisolvent for degree " +
                           std::to_string(order.poly_degree()) + " (rank " +
                           std::to_string(uni.rank) + " of " +
                           std::to_string(uni.required) + ")");
  Assembled asm_ = assemble(centers, order);
  const int n = centers.size();
  const int q = basis_.size();
  SymmetricIndefiniteSolver solver(asm_.system);
  if (solver.condition_estimate() > kConditionError)
    throw IllConditionedError("saddle system condition estimate " +
                                  format_g17(solver.condition_estimate()) +
                                  " exceeds limit",
                              solver.condition_estimate());
  Matrix rhs = Matrix::Zero(n + q, n);
  rhs.topLeftCorner(n, n) = Matrix::Identity(n, n);
  coefficients_ = solver.solve(rhs);

  const Matrix resid = asm_.system * coefficients_ - rhs;
  FitDiagnostics diag;
  diag.condition_estimate = solver.condition_estimate();
  diag.max_residual = resid.topRows(n).cwiseAbs().maxCoeff();
  double a_scale = coefficients_.topRows(n).cwiseAbs().colwise().sum().maxCoeff();
  diag.side_condition_residual =
      resid.bottomRows(q).cwiseAbs().maxCoeff() / (a_scale > 0 ? a_scale : 1.0);
  diag.tolerance_met = diag.max_residual <= kInterpolationTol &&
                       diag.side_condition_residual <= kInterpolationTol;
  diag.condition_warning = diag.condition_estimate > kConditionWarn;
  diagnostics_ = diag;
}

Interpolant LagrangeBasis::column(int i) const {
  const int n = size();
  const int q = basis_.size();
  return Interpolant(order_, centers_.points(), coefficients_.col(i).head(n),
                     basis_, coefficients_.col(i).tail(q), diagnostics_);
}

double LagrangeBasis::evaluate(int i, const Vector& x) const {
  return evaluate_all(x)[i];
}

Vector LagrangeBasis::evaluate_all(const Vector& x) const {
  const int n = size();
  const int q = basis_.size();
  const auto [c, s] = centers_.domain().working_normalization();
  Eigen::RowVectorXd k(n + q);
  for (int j = 0; j < n; ++j) {
    const double r = ((x - centers_.point(j)) / s).norm();
    k[j] = phi(order_, r);
  }
  for (int j = 0; j < q; ++j) k[n + j] = basis_.monomial(j, x);
  (void)c;
  return (k * coefficients_).transpose();
}

Matrix LagrangeBasis::evaluate_all(const Matrix& points) const {
  const int n = size();
  const int q = basis_.size();
  const double s = centers_.domain().working_normalization().second;
  Matrix out(points.rows(), n);
  const std::size_t chunk = 512;
  parallel_blocks(static_cast<std::size_t>(points.rows()), chunk,
                  [&](std::size_t lo, std::size_t hi) {
                    const Eigen::Index rows = static_cast<Eigen::Index>(hi - lo);
                    Matrix k(rows, n + q);
                    for (Eigen::Index r = 0; r < rows; ++r) {
                      const Vector x =
                          points.row(static_cast<Eigen::Index>(lo) + r).transpose();
                      for (int j = 0; j < n; ++j)
                        k(r, j) = phi(order_, ((x - centers_.point(j)) / s).norm());
                      for (int j = 0; j < q; ++j) k(r, n + j) = basis_.monomial(j, x);
                    }
                    out.middleRows(static_cast<Eigen::Index>(lo), rows).noalias() =
                        k * coefficients_;
                  });
  return out;
}

double LagrangeBasis::kronecker_defect() const {
  const Matrix vals = evaluate_all(centers_.points());
  return (vals - Matrix::Identity(size(), size())).cwiseAbs().maxCoeff();
}

double native_energy(const Interpolant& s) {
  const Vector& a = s.kernel_coefficients();
  const Eigen::Index n = a.size();
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Side conditions must hold for the quadratic form to be meaningful.
  const Matrix v = s.poly_basis().vandermonde(s.centers());
  const double side = (v.transpose() * a).cwiseAbs().maxCoeff();
  const double a_scale = a.cwiseAbs().sum();
  if (side > 1e-6 * a_scale)
    throw NumericalError("native energy undefined: side conditions violated "
                         "(residual " +
                         format_g17(side / a_scale) + ")");

  const double scale = s.poly_basis().scale();
  double quad = 0.0, abs_quad = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = ((s.centers().row(i) - s.centers().row(j)) / scale).norm();
      const double k = phi(s.order(), r);
      quad += a[i] * a[j] * k;
      abs_quad += std::abs(a[i] * a[j] * k);
    }

  // Sign making the kernel conditionally positive definite of order m.
  const int m = s.order().m, d = s.order().d;
  const int exponent = d % 2 == 1 ? m - (d - 1) / 2 : m - d / 2 + 1;
  const double sign = exponent % 2 == 0 ? 1.0 : -1.0;
  double energy = sign * quad;
  if (energy < 0) {
    if (-energy <= 1e-12 * std::max(abs_quad, 1e-300)) return 0.0;
    throw NumericalError("native energy came out negative; side conditions or "
                         "conditioning are suspect");
  }
  return energy;
}

} // namespace splinestab

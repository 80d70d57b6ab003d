#include "splinestab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "splinestab/errors.hpp"
#include "splinestab/random.hpp"

namespace splinestab {

namespace {

void check_dimension(int d) {
  if (d < 1) throw Error("domain dimension must be >= 1");
}

void check_margins(double r0, double r1) {
  if (!(r1 > 0)) throw Error("domain diameter must be positive");
  if (!(r0 > 0 && r0 < r1)) throw Error("support margin must satisfy 0 < r0 < r1");
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double scale = inv;
  double x = 0.0;
  while (i > 0) {
    x += static_cast<double>(i % base) * scale;
    i /= base;
    scale *= inv;
  }
  return x;
}

constexpr std::uint64_t kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

} // namespace

Domain Domain::box(const Vector& lo, const Vector& hi, double support_margin) {
  check_dimension(static_cast<int>(lo.size()));
  if (lo.size() != hi.size()) throw Error("box corners must share a dimension");
  if (((hi - lo).array() <= 0).any()) throw Error("box must have positive extent");
  Domain d;
  d.d_ = static_cast<int>(lo.size());
  d.shape_ = DomainShape::Box;
  d.lo_ = lo;
  d.hi_ = hi;
  d.r1_ = (hi - lo).norm();
  d.r0_ = support_margin;
  check_margins(d.r0_, d.r1_);
  if (((hi - lo).array() <= 2 * support_margin).any())
    throw Error("support region is empty: box too thin for margin r0");
  return d;
}

Domain Domain::ball(const Vector& center, double radius, double support_margin) {
  check_dimension(static_cast<int>(center.size()));
  if (!(radius > 0)) throw Error("ball radius must be positive");
  Domain d;
  d.d_ = static_cast<int>(center.size());
  d.shape_ = DomainShape::Ball;
  d.center_ = center;
  d.radius_ = radius;
  d.r1_ = 2 * radius;
  d.r0_ = support_margin;
  check_margins(d.r0_, d.r1_);
  if (!(support_margin < radius))
    throw Error("support region is empty: margin r0 exceeds ball radius");
  return d;
}

Domain Domain::box_around(const Matrix& points, double pad) {
  if (points.rows() == 0) throw Error("cannot wrap an empty point set");
  if (!(pad > 0)) throw Error("pad must be positive");
  Vector lo = points.colwise().minCoeff().transpose().array() - pad;
  Vector hi = points.colwise().maxCoeff().transpose().array() + pad;
  return box(lo, hi, pad / 2);
}

const Vector& Domain::box_lo() const {
  if (shape_ != DomainShape::Box) throw Error("not a box domain");
  return lo_;
}
const Vector& Domain::box_hi() const {
  if (shape_ != DomainShape::Box) throw Error("not a box domain");
  return hi_;
}
const Vector& Domain::ball_center() const {
  if (shape_ != DomainShape::Ball) throw Error("not a ball domain");
  return center_;
}
double Domain::ball_radius() const {
  if (shape_ != DomainShape::Ball) throw Error("not a ball domain");
  return radius_;
}

Vector Domain::centroid() const {
  return shape_ == DomainShape::Box ? Vector(0.5 * (lo_ + hi_)) : center_;
}

Vector Domain::bounding_lo() const {
  return shape_ == DomainShape::Box ? lo_ : Vector(center_.array() - radius_);
}
Vector Domain::bounding_hi() const {
  return shape_ == DomainShape::Box ? hi_ : Vector(center_.array() + radius_);
}

bool Domain::contains(const Vector& x, double tol) const {
  if (x.size() != d_) return false;
  if (shape_ == DomainShape::Box)
    return (x.array() >= lo_.array() - tol).all() &&
           (x.array() <= hi_.array() + tol).all();
  return (x - center_).norm() <= radius_ + tol;
}

bool Domain::in_support_region(const Vector& x) const {
  if (x.size() != d_) return false;
  if (shape_ == DomainShape::Box)
    return (x.array() >= lo_.array() + r0_).all() &&
           (x.array() <= hi_.array() - r0_).all();
  return (x - center_).norm() <= radius_ - r0_;
}

std::pair<Vector, double> Domain::working_normalization() const {
  return {centroid(), r1_ / 2};
}

CenterSet::CenterSet(Domain domain, Matrix points, double dedupe_rel_tol)
    : domain_(std::move(domain)), points_(std::move(points)),
      dedupe_rel_tol_(dedupe_rel_tol) {
  if (points_.rows() == 0) throw Error("center set must be nonempty");
  if (points_.cols() != domain_.dimension())
    throw Error("center dimension does not match domain");
  const double tol = 1e-12 * domain_.diameter();
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (!domain_.contains(points_.row(i).transpose(), tol))
      throw Error("center " + std::to_string(i) + " lies outside the domain");
  }
  const double min_gap = dedupe_rel_tol_ * domain_.diameter();
  for (Eigen::Index i = 0; i < points_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points_.rows(); ++j)
      if ((points_.row(i) - points_.row(j)).norm() < min_gap)
        throw Error("duplicate centers at indices " + std::to_string(i) + "," +
                    std::to_string(j) + " (closer than dedupe tolerance)");
  for (Eigen::Index i = 0; i < points_.rows(); ++i)
    if (domain_.in_support_region(points_.row(i).transpose()))
      support_.push_back(static_cast<int>(i));
  if (support_.empty())
    throw Error("no center lies in the support region (Xi_f empty)");
}

Region Region::ball(const Vector& center, double radius) {
  if (!(radius > 0)) throw Error("region radius must be positive");
  Region r;
  r.kind = Kind::Ball;
  r.center = center;
  r.radius = radius;
  return r;
}

Region Region::complement(const Vector& center, double radius, double truncation) {
  if (!(radius > 0)) throw Error("region radius must be positive");
  if (!(truncation > radius))
    throw Error("complement truncation radius must exceed the region radius");
  Region r;
  r.kind = Kind::Complement;
  r.center = center;
  r.radius = radius;
  r.truncation = truncation;
  return r;
}

Region Region::annulus(const Vector& center, double outer_radius, double width) {
  if (!(outer_radius > 0)) throw Error("region radius must be positive");
  if (!(width > 0 && width <= outer_radius))
    throw Error("annulus width must satisfy 0 < w <= R");
  Region r;
  r.kind = Kind::Annulus;
  r.center = center;
  r.radius = outer_radius;
  r.width = width;
  return r;
}

Vector separation(const CenterSet& centers) {
  const int n = centers.size();
  if (n < 2) throw Error("separation undefined for a singleton center set");
  const Matrix& p = centers.points();
  Vector q(n);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      best = std::min(best, (p.row(i) - p.row(j)).norm());
    }
    q[i] = best;
  }
  return q;
}

double fill_distance(const CenterSet& centers, int probe_resolution) {
  if (probe_resolution < 2) throw Error("probe resolution must be >= 2");
  const Domain& dom = centers.domain();
  const int d = dom.dimension();
  const Vector lo = dom.bounding_lo(), hi = dom.bounding_hi();
  const Matrix& p = centers.points();

  std::vector<int> idx(d, 0);
  Vector x(d);
  double h = 0;
  for (;;) {
    for (int k = 0; k < d; ++k)
      x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (probe_resolution - 1);
    if (dom.contains(x, 1e-12 * dom.diameter())) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < p.rows(); ++j)
        best = std::min(best, (x.transpose() - p.row(j)).norm());
      h = std::max(h, best);
    }
    int k = 0;
    while (k < d && ++idx[k] == probe_resolution) idx[k++] = 0;
    if (k == d) break;
  }
  return h;
}

GeneratorSpec GeneratorSpec::uniform_grid(int n_per_axis) {
  GeneratorSpec s;
  s.kind = Kind::UniformGrid;
  s.n = n_per_axis;
  return s;
}
GeneratorSpec GeneratorSpec::low_discrepancy(int n) {
  GeneratorSpec s;
  s.kind = Kind::LowDiscrepancy;
  s.n = n;
  return s;
}
GeneratorSpec GeneratorSpec::graded(int n, double g, const Vector& focus) {
  GeneratorSpec s;
  s.kind = Kind::Graded;
  s.n = n;
  s.grading = g;
  s.focus = focus;
  return s;
}
GeneratorSpec GeneratorSpec::clustered(int n, int clusters, double cluster_radius) {
  GeneratorSpec s;
  s.kind = Kind::Clustered;
  s.n = n;
  s.clusters = clusters;
  s.cluster_radius = cluster_radius;
  return s;
}

std::string GeneratorSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
  case Kind::UniformGrid:
    os << "uniform-grid(n=" << n << ")";
    break;
  case Kind::LowDiscrepancy:
    os << "low-discrepancy(n=" << n << ")";
    break;
  case Kind::Graded:
    os << "graded(n=" << n << ",g=" << grading << ",focus=";
    for (Eigen::Index i = 0; i < focus.size(); ++i)
      os << (i ? " " : "") << focus[i];
    os << ")";
    break;
  case Kind::Clustered:
    os << "clustered(n=" << n << ",k=" << clusters << ",r=" << cluster_radius << ")";
    break;
  }
  return os.str();
}

namespace {

// Keeps the first of every near-duplicate pair; preserves order otherwise.
Matrix dedupe(const Matrix& pts, double min_gap) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    bool dup = false;
    for (Eigen::Index j : keep) {
      if ((pts.row(i) - pts.row(j)).norm() < min_gap) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(i);
  }
  Matrix out(static_cast<Eigen::Index>(keep.size()), pts.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = pts.row(keep[r]);
  return out;
}

Matrix tensor_grid(const Domain& dom, const std::vector<std::vector<double>>& axes) {
  const int d = dom.dimension();
  Eigen::Index total = 1;
  for (const auto& a : axes) total *= static_cast<Eigen::Index>(a.size());
  std::vector<int> idx(d, 0);
  std::vector<Vector> rows;
  rows.reserve(total);
  Vector x(d);
  for (;;) {
    for (int k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    if (dom.contains(x, 1e-12 * dom.diameter())) rows.push_back(x);
    int k = 0;
    while (k < d && ++idx[k] == static_cast<int>(axes[k].size())) idx[k++] = 0;
    if (k == d) break;
  }
  Matrix out(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return out;
}

// Per-axis power-law map concentrating points at the focus coordinate.
// With exponent g the local spacing scales like dist(.,focus)^(1-1/g), which
// pairs the grading g with slow-growth exponent eps ~ 1/g.
std::vector<double> graded_axis(double lo, double hi, double focus, double g, int n) {
  std::vector<double> out;
  out.reserve(n);
  focus = std::min(std::max(focus, lo), hi);
  const double left = focus - lo, right = hi - focus;
  const double total = left + right;
  int n_left = static_cast<int>(std::lround((n - 1) * left / total));
  if (left > 0 && n_left == 0) n_left = 1;
  if (right > 0 && n_left == n - 1) n_left = n - 2;
  if (right == 0) n_left = n - 1;
  const int n_right = n - 1 - n_left;
  for (int i = n_left; i >= 1; --i)
    out.push_back(focus - left * std::pow(static_cast<double>(i) / n_left, g));
  out.push_back(focus);
  for (int j = 1; j <= n_right; ++j)
    out.push_back(focus + right * std::pow(static_cast<double>(j) / n_right, g));
  return out;
}

Matrix generate_points(const Domain& dom, const GeneratorSpec& spec,
                       std::uint64_t seed) {
  const int d = dom.dimension();
  const Vector lo = dom.bounding_lo(), hi = dom.bounding_hi();

  switch (spec.kind) {
  case GeneratorSpec::Kind::UniformGrid: {
    if (spec.n < 2) throw Error("uniform-grid needs n >= 2 per axis");
    std::vector<std::vector<double>> axes(d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < spec.n; ++i)
        axes[k].push_back(lo[k] + (hi[k] - lo[k]) * i / (spec.n - 1));
    return tensor_grid(dom, axes);
  }
  case GeneratorSpec::Kind::LowDiscrepancy: {
    if (spec.n < 1) throw Error("low-discrepancy needs n >= 1");
    if (d > 8) throw Error("low-discrepancy generator supports d <= 8");
    std::vector<Vector> rows;
    Vector x(d);
    for (std::uint64_t i = 1; rows.size() < static_cast<std::size_t>(spec.n); ++i) {
      for (int k = 0; k < d; ++k)
        x[k] = lo[k] + (hi[k] - lo[k]) * radical_inverse(i, kHaltonBases[k]);
      if (dom.contains(x)) rows.push_back(x);
      if (i > 1000ull * static_cast<std::uint64_t>(spec.n) + 1000ull)
        throw Error("low-discrepancy rejection did not terminate");
    }
    Matrix out(spec.n, d);
    for (int r = 0; r < spec.n; ++r) out.row(r) = rows[r].transpose();
    return out;
  }
  case GeneratorSpec::Kind::Graded: {
    if (!(spec.grading > 0)) throw Error("graded spec requires exponent g > 0");
    if (spec.focus.size() != d) throw Error("graded focus dimension mismatch");
    const int per_axis =
        d == 1 ? spec.n
               : static_cast<int>(std::lround(std::pow(static_cast<double>(spec.n), 1.0 / d)));
    if (per_axis < 3) throw Error("graded spec needs at least 3 points per axis");
    std::vector<std::vector<double>> axes(d);
    for (int k = 0; k < d; ++k)
      axes[k] = graded_axis(lo[k], hi[k], spec.focus[k], spec.grading, per_axis);
    return tensor_grid(dom, axes);
  }
  case GeneratorSpec::Kind::Clustered: {
    if (spec.clusters < 1) throw Error("clustered spec needs at least one cluster");
    if (spec.n < spec.clusters) throw Error("clustered spec needs n >= clusters");
    if (!(spec.cluster_radius > 0)) throw Error("cluster radius must be positive");
    std::mt19937_64 rng(seed);
    Matrix hubs(spec.clusters, d);
    for (int c = 0; c < spec.clusters; ++c) {
      // hub positions keep one cluster radius away from the boundary
      for (;;) {
        Vector x(d);
        for (int k = 0; k < d; ++k)
          x[k] = lo[k] + (hi[k] - lo[k]) * uniform01(rng);
        bool inside = dom.shape() == DomainShape::Box
                          ? (x.array() >= lo.array() + spec.cluster_radius).all() &&
                                (x.array() <= hi.array() - spec.cluster_radius).all()
                          : (x - dom.ball_center()).norm() <=
                                dom.ball_radius() - spec.cluster_radius;
        if (inside) {
          hubs.row(c) = x.transpose();
          break;
        }
      }
    }
    Matrix pts(spec.n, d);
    for (int i = 0; i < spec.n; ++i) {
      const int c = i % spec.clusters;
      // rejection sampling inside the cluster ball keeps the stream exact
      for (;;) {
        Vector off(d);
        for (int k = 0; k < d; ++k) off[k] = (2 * uniform01(rng) - 1) * spec.cluster_radius;
        if (off.norm() <= spec.cluster_radius) {
          pts.row(i) = hubs.row(c) + off.transpose();
          break;
        }
      }
    }
    return pts;
  }
  }
  throw Error("unknown generator kind");
}

} // namespace

CenterSet generate_centers(const Domain& domain, const GeneratorSpec& spec,
                           std::uint64_t seed) {
  Matrix pts = generate_points(domain, spec, seed);
  const double rel_tol = 1e-12;
  pts = dedupe(pts, rel_tol * domain.diameter());
  return CenterSet(domain, std::move(pts), rel_tol);
}

} // namespace splinestab

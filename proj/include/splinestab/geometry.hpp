#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace splinestab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class DomainShape { Box, Ball };

/// Bounded working domain: an axis-aligned box or a ball, together with the
/// diameter r1 and the support margin r0 (distance kept between the support
/// of target functions and the boundary).
class Domain {
public:
  static Domain box(const Vector& lo, const Vector& hi, double support_margin);
  static Domain ball(const Vector& center, double radius, double support_margin);
  /// Box wrapping the given points with `pad` on each side; r0 = pad/2.
  static Domain box_around(const Matrix& points, double pad);

  int dimension() const { return d_; }
  DomainShape shape() const { return shape_; }
  double diameter() const { return r1_; }       // r1
  double support_margin() const { return r0_; } // r0

  const Vector& box_lo() const;
  const Vector& box_hi() const;
  const Vector& ball_center() const;
  double ball_radius() const;

  Vector centroid() const;
  /// Bounding box of the domain (equals the box itself for box domains).
  Vector bounding_lo() const;
  Vector bounding_hi() const;

  bool contains(const Vector& x, double tol = 0.0) const;
  /// True if x lies in the domain shrunk by r0.
  bool in_support_region(const Vector& x) const;

  /// Normalization mapping the domain into the unit ball: (center, scale)
  /// with scale = r1/2.
  std::pair<Vector, double> working_normalization() const;

private:
  Domain() = default;
  int d_ = 0;
  DomainShape shape_ = DomainShape::Box;
  double r1_ = 0, r0_ = 0;
  Vector lo_, hi_;     // box
  Vector center_;      // ball
  double radius_ = 0;  // ball
};

/// Finite scattered center set inside a domain. Construction validates
/// containment, rejects near-duplicate points (closer than
/// dedupe_rel_tol * r1) and requires a nonempty intersection with the
/// support region.
class CenterSet {
public:
  CenterSet(Domain domain, Matrix points, double dedupe_rel_tol = 1e-12);

  int size() const { return static_cast<int>(points_.rows()); }
  int dimension() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }
  Vector point(int i) const { return points_.row(i).transpose(); }
  const Domain& domain() const { return domain_; }
  double dedupe_tolerance() const { return dedupe_rel_tol_; }

  /// Indices of centers in the support region (Xi_f).
  const std::vector<int>& support_indices() const { return support_; }

private:
  Domain domain_;
  Matrix points_;
  double dedupe_rel_tol_;
  std::vector<int> support_;
};

/// Ball / ball-complement / annulus used for localized seminorms.
struct Region {
  enum class Kind { Ball, Complement, Annulus };

  static Region ball(const Vector& center, double radius);
  static Region complement(const Vector& center, double radius, double truncation);
  static Region annulus(const Vector& center, double outer_radius, double width);

  Kind kind;
  Vector center;
  double radius = 0;     // outer radius R
  double width = 0;      // annulus only
  double truncation = 0; // complement only, > R
};

/// Distance from each center to its nearest other center. Throws on a
/// singleton set ("separation undefined").
Vector separation(const CenterSet& centers);

/// Grid under-approximation of sup_{x in Omega} dist(x, Xi) using
/// probe_resolution points per axis.
double fill_distance(const CenterSet& centers, int probe_resolution = 64);

/// Point-set generator descriptor.
struct GeneratorSpec {
  enum class Kind { UniformGrid, LowDiscrepancy, Graded, Clustered };
  Kind kind = Kind::UniformGrid;
  int n = 0;                 // per axis for UniformGrid, total otherwise
  double grading = 0;        // Graded: exponent g > 0
  Vector focus;              // Graded: focus point
  int clusters = 0;          // Clustered
  double cluster_radius = 0; // Clustered

  static GeneratorSpec uniform_grid(int n_per_axis);
  static GeneratorSpec low_discrepancy(int n);
  static GeneratorSpec graded(int n, double g, const Vector& focus);
  static GeneratorSpec clustered(int n, int clusters, double cluster_radius);

  std::string describe() const;
};

/// Deterministic center generation: identical output for identical
/// (domain, spec, seed) on every run.
CenterSet generate_centers(const Domain& domain, const GeneratorSpec& spec,
                           std::uint64_t seed);

} // namespace splinestab

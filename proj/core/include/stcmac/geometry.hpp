#pragma once

#include "stcmac/rng.hpp"

namespace stcmac {

enum class Shape { Disk, Ellipse };

/// Receiver coverage centered on the sink.
///
/// A disk of radius R (horizontal links) or an ellipse with semi-minor axis R
/// and semi-major axis alpha*R (vertical links). The major axis lies along x.
class Coverage {
 public:
  static Coverage disk(double radius);
  static Coverage ellipse(double radius, double alpha);

  Shape shape() const noexcept { return shape_; }
  double radius() const noexcept { return radius_; }
  double alpha() const noexcept { return alpha_; }

  /// pi * alpha * R^2
  double area() const noexcept;
  /// Farthest sink distance inside the coverage, alpha * R.
  double max_range() const noexcept { return alpha_ * radius_; }

  friend bool operator==(const Coverage&, const Coverage&) = default;

 private:
  Coverage(Shape shape, double radius, double alpha) : shape_(shape), radius_(radius), alpha_(alpha) {}

  Shape shape_;
  double radius_;
  double alpha_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double norm(Point p) noexcept;

/// Area of the coverage that lies within distance r of the sink.
///
/// pi*r^2 up to r = R; beyond that the disk of radius r pokes out of the
/// ellipse along the minor axis and only the overlap counts. Throws
/// std::domain_error outside [0, alpha*R].
double covered_area_within_radius(const Coverage& cov, double r);

/// Coverage area between sink distances a and b (a <= b).
double annulus_area(const Coverage& cov, double a, double b);

/// Density of the sink distance of a point uniform over the coverage.
double radial_pdf(const Coverage& cov, double l);

/// Distance between two points uniform in a disk of radius R. Zero outside (0, 2R).
double link_pdf_disk(double l, double radius);

/// Link-distance density used for elliptical coverage. l is measured in units
/// of R, so the returned density is per metre (divided by R).
double link_pdf_ellipse(double l, double radius, double alpha);

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);
/// exp(-x) * I0(x); finite for large x.
double bessel_i0e(double x);

Point sample_uniform_point(const Coverage& cov, Rng& rng);

}  // namespace stcmac

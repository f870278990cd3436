#include "stcmac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stcmac/error.hpp"

namespace stcmac {
namespace {

constexpr double kPi = std::numbers::pi;

// Rounding slack when a caller passes exactly max_range() computed another way.
constexpr double kRangeSlack = 1e-12;

double check_radius(const Coverage& cov, double r, const char* what) {
  const double hi = cov.max_range();
  if (!(r >= 0.0) || r > hi * (1.0 + kRangeSlack)) {
    throw std::domain_error(std::string(what) + ": distance " + std::to_string(r) +
                            " outside [0, " + std::to_string(hi) + "]");
  }
  return std::min(r, hi);
}

// Half-chord of the ellipse at the point where the circle of radius r crosses
// it, divided by alpha: sqrt((r^2 - R^2) / (alpha^2 - 1)).
double crossing_x_over_alpha(const Coverage& cov, double r) {
  const double R = cov.radius();
  const double a = cov.alpha();
  return std::sqrt(std::max(0.0, (r - R) * (r + R) / (a * a - 1.0)));
}

// sqrt(R^2 - q^2), which also equals sqrt(r^2 - alpha^2 q^2). Formed directly so
// the angles stay accurate as r approaches alpha R.
double crossing_residual(const Coverage& cov, double r) {
  const double aR = cov.alpha() * cov.radius();
  const double a = cov.alpha();
  return std::sqrt(std::max(0.0, (aR - r) * (aR + r) / (a * a - 1.0)));
}

}  // namespace

Coverage Coverage::disk(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("R", "radius must be positive");
  return Coverage(Shape::Disk, radius, 1.0);
}

Coverage Coverage::ellipse(double radius, double alpha) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("R", "radius must be positive");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ConfigError("alpha", "must be >= 1");
  return Coverage(Shape::Ellipse, radius, alpha);
}

double Coverage::area() const noexcept { return kPi * alpha_ * radius_ * radius_; }

double norm(Point p) noexcept { return std::hypot(p.x, p.y); }

double covered_area_within_radius(const Coverage& cov, double r) {
  r = check_radius(cov, r, "covered_area_within_radius");
  const double R = cov.radius();
  if (r <= R) return kPi * r * r;

  const double a = cov.alpha();
  const double q = crossing_x_over_alpha(cov, r);
  const double w = crossing_residual(cov, r);
  // Two elliptical caps around the minor axis plus two circular sectors
  // around the major axis.
  return 2.0 * a * R * R * std::atan2(q, w) + 2.0 * r * r * std::atan2(w, a * q);
}

double annulus_area(const Coverage& cov, double a, double b) {
  if (a > b) {
    throw std::domain_error("annulus_area: inner radius " + std::to_string(a) + " exceeds outer radius " +
                            std::to_string(b));
  }
  if (a == b) return 0.0;
  return covered_area_within_radius(cov, b) - covered_area_within_radius(cov, a);
}

double radial_pdf(const Coverage& cov, double l) {
  l = check_radius(cov, l, "radial_pdf");
  const double R = cov.radius();
  if (l <= R) return 2.0 * kPi * l / cov.area();
  // d/dl of the covered area is l times the angle of the circle still inside.
  const double q = crossing_x_over_alpha(cov, l);
  return 4.0 * l * std::atan2(crossing_residual(cov, l), cov.alpha() * q) / cov.area();
}

double link_pdf_disk(double l, double radius) {
  if (!(l > 0.0) || !(l < 2.0 * radius)) return 0.0;
  const double u = l / (2.0 * radius);
  const double R2 = radius * radius;
  return (2.0 * l / R2) * ((2.0 / kPi) * std::acos(u) - (l / (kPi * radius)) * std::sqrt(1.0 - u * u));
}

double link_pdf_ellipse(double l, double radius, double alpha) {
  if (l < 0.0) throw std::domain_error("link_pdf_ellipse: negative distance");
  if (!(alpha >= 1.0)) throw std::domain_error("link_pdf_ellipse: alpha must be >= 1");
  const double x = l / radius;
  const double a2 = alpha * alpha;
  const double x2 = x * x;
  // exp(-p x^2) I0(q x^2) = exp(-(p - q) x^2) * i0e(q x^2), with p - q = 9 / (4 alpha^2).
  const double bessel_arg = 9.0 * x2 * (a2 - 1.0) / (8.0 * a2);
  const double decay = 9.0 * x2 / (4.0 * a2);
  return (9.0 * x / (2.0 * alpha)) * std::exp(-decay) * bessel_i0e(bessel_arg) / radius;
}

namespace {

constexpr double kSeriesLimit = 30.0;

// sum_k (x^2/4)^k / (k!)^2; all terms positive so there is no cancellation.
double i0_series(double x) {
  const double y = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= y / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// sqrt(2 pi x) e^{-x} I0(x) ~ sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated at the smallest term.
double i0_asymptotic_scaled(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < sum * 1e-17) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

}  // namespace

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= kSeriesLimit) return i0_series(x);
  return std::exp(x) * i0_asymptotic_scaled(x);
}

double bessel_i0e(double x) {
  x = std::abs(x);
  if (x <= kSeriesLimit) return std::exp(-x) * i0_series(x);
  return i0_asymptotic_scaled(x);
}

Point sample_uniform_point(const Coverage& cov, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = std::sqrt(unit(rng));
  const double theta = 2.0 * kPi * unit(rng);
  return {cov.max_range() * r * std::cos(theta), cov.radius() * r * std::sin(theta)};
}

}  // namespace stcmac

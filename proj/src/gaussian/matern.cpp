#include "gencp/gaussian/matern.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gencp {

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

void MaternSpec::validate() const {
  if (!std::isfinite(nugget) || !std::isfinite(sill) || !std::isfinite(smoothness) || !std::isfinite(range))
    throw std::invalid_argument("MaternSpec: non-finite parameter");
  if (nugget < 0.0) throw std::invalid_argument("MaternSpec: nugget must be >= 0");
  if (sill <= 0.0) throw std::invalid_argument("MaternSpec: sill must be > 0");
  if (smoothness <= 0.0) throw std::invalid_argument("MaternSpec: smoothness must be > 0");
  if (range <= 0.0) throw std::invalid_argument("MaternSpec: range must be > 0");
}

std::string MaternSpec::describe() const {
  std::ostringstream os;
  os << "Matern(nugget=" << nugget << ", sill=" << sill << ", nu=" << smoothness << ", range=" << range << ")";
  return os.str();
}

double matern_correlation_bessel(double r, double smoothness) {
  if (r < 0.0 || !std::isfinite(r)) throw std::invalid_argument("matern: distance must be finite and >= 0");
  const double x = std::sqrt(2.0 * smoothness) * r;
  if (x < 1e-12) return 1.0;
  if (x > 700.0) return 0.0;
  // log form keeps x^nu K_nu(x) finite for large nu and small x
  const double k = std::cyl_bessel_k(smoothness, x);
  if (k == 0.0) return 0.0;
  const double log_value =
      (1.0 - smoothness) * std::log(2.0) - std::lgamma(smoothness) + smoothness * std::log(x) + std::log(k);
  const double value = std::exp(log_value);
  return value > 1.0 ? 1.0 : value;
}

double matern_correlation(double r, double smoothness) {
  if (r < 0.0 || !std::isfinite(r)) throw std::invalid_argument("matern: distance must be finite and >= 0");
  if (near(smoothness, 0.5)) return std::exp(-r);
  if (near(smoothness, 1.5)) {
    const double t = std::sqrt(3.0) * r;
    return (1.0 + t) * std::exp(-t);
  }
  if (near(smoothness, 2.5)) {
    const double t = std::sqrt(5.0) * r;
    return (1.0 + t + t * t / 3.0) * std::exp(-t);
  }
  return matern_correlation_bessel(r, smoothness);
}

double matern_cov(double d, const MaternSpec& spec) {
  if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("matern_cov: distance must be finite and >= 0");
  spec.validate();
  if (d == 0.0) return spec.nugget + spec.sill;
  return spec.sill * matern_correlation(d / spec.range, spec.smoothness);
}

double matern_semivariance(double h, const MaternSpec& spec) {
  if (h == 0.0) return 0.0;
  return spec.nugget + spec.sill - matern_cov(h, spec);
}

}  // namespace gencp

#pragma once

#include <string>

namespace gencp {

// Matern covariance C(d) = b 1{d=0} + s2 * 2^{1-nu}/Gamma(nu) (sqrt(2 nu) d/rho)^nu K_nu(sqrt(2 nu) d/rho).
struct MaternSpec {
  double nugget = 0.0;     // b, variance units
  double sill = 1.0;       // sigma^2 of the structured part
  double smoothness = 0.5; // nu
  double range = 1.0;      // rho, distance units

  void validate() const;
  std::string describe() const;
};

// Correlation of the structured part at scaled distance r = d / rho; equals 1 at r = 0.
// Closed forms are used for nu in {1/2, 3/2, 5/2}; other values go through K_nu.
double matern_correlation(double r, double smoothness);

// Same correlation, always through the Bessel route (used to cross-check the closed forms).
double matern_correlation_bessel(double r, double smoothness);

double matern_cov(double d, const MaternSpec& spec);

// Semivariance gamma(h) = C(0) - C(h) for h > 0 and 0 at h = 0.
double matern_semivariance(double h, const MaternSpec& spec);

}  // namespace gencp

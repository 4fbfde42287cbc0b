#pragma once

#include <cstdlib>
#include <string>
#include <string_view>

namespace gnslab {

/// Tolerances shared by every module. Error contracts elsewhere refer to
/// these fields by name rather than hard-coding thresholds.
struct NumericPolicy {
  std::string profile = "default";
  double hermiticity = 1e-10;     // relative: ||m - m*|| <= tol * ||m||
  double rank = 1e-10;            // relative singular-value cutoff
  double orthonormality = 1e-12;  // Gram-Schmidt / unit-vector checks
  double purity = 1e-9;           // second eigenvalue of a pure density
  double psd = 1e-10;             // negative eigenvalue allowance for states
  double trace = 1e-10;           // |sum tr rho_k - 1|
  double orthogonal_ray = 1e-10;  // ray products at or below this are orthogonal
  double minus_one_gap = 1e-8;    // distance of a spectrum from -1 for logs / Cayley
  double antipodal = 1e-8;        // state distance must stay below 2 - this
  double normalization = 1e-8;    // |omega(b*b) - 1| for perturbations
  double link = 1e-8;             // smallest admissible |<psi_a, psi_b>| on a grid edge
  double curvature_margin = 0.1;  // plaquette phases must stay below pi - margin
  double chart_overlap = 1e-6;    // ray product with a chart centre to belong to its chart

  static NumericPolicy defaults() { return {}; }

  static NumericPolicy strict() {
    NumericPolicy p;
    p.profile = "strict";
    p.hermiticity = 1e-12;
    p.rank = 1e-12;
    p.orthonormality = 1e-13;
    p.purity = 1e-11;
    p.psd = 1e-12;
    p.trace = 1e-12;
    return p;
  }

  static NumericPolicy from_profile(std::string_view name) {
    if (name == "strict") return strict();
    return defaults();
  }

  /// Reads GNSLAB_TOL_PROFILE (strict | default). Unset or unknown means default.
  static NumericPolicy from_environment() {
    const char* env = std::getenv("GNSLAB_TOL_PROFILE");
    return from_profile(env ? std::string_view(env) : std::string_view("default"));
  }
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy = NumericPolicy::from_environment();
  return policy;
}

}  // namespace gnslab

#pragma once

namespace blrm {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF), Wichura's AS 241 (PPND16).
/// p must lie in (0, 1).
double normal_quantile(double p);

}  // namespace blrm

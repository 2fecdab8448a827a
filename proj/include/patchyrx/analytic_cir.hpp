#ifndef PATCHYRX_ANALYTIC_CIR_HPP
#define PATCHYRX_ANALYTIC_CIR_HPP

#include <vector>

#include "patchyrx/capacitance.hpp"
#include "patchyrx/geometry.hpp"

namespace patchyrx {

/// Scalars the closed-form channel response is written in:
///   epsilon = (r_0 - r_R) / sqrt(4 D)        [sqrt(s)]
///   gamma   = (w r_R + D) / (D r_R)          [1/um]
///   zeta    = gamma^2 D - k_d                [1/s]
///   beta    = (r_0 - r_R) sqrt(k_d / D)      [dimensionless]
struct DerivedCoefficients {
    double epsilon = 0.0;
    double gamma = 0.0;
    double zeta = 0.0;
    double beta = 0.0;
};

DerivedCoefficients derived_coefficients(double w, const ChannelParams& params);

/// Expected per-molecule hitting rate h_u(t, w) (1/s) at a uniform-rate
/// receiver. Every exp * erfc pairing is routed through the scaled
/// complementary error function, and the two contributions are arranged as a
/// sum of nonnegative terms, so the value is finite and >= 0 for
/// w up to 1e9 um/s, t up to 1e3 s and k_d up to 1e2 1/s.
double hitting_rate_uniform(double t, double w, const ChannelParams& params);

/// Expected cumulative absorbed fraction H_u(t, w), in [0, 1] and
/// nondecreasing in t. For k_d > 0 this is the closed form; near the
/// removable zero of zeta(w) it switches to a symmetric two-sided evaluation
/// at w (1 +- 1e-6). For k_d = 0 the rate is integrated by adaptive
/// Gauss-Kronrod quadrature (tolerance 1e-11).
double cumulative_fraction_uniform(double t, double w, const ChannelParams& params);

/// Batch evaluation over an ascending time grid. Matches the single-time
/// overload pointwise; for k_d = 0 the quadrature proceeds incrementally
/// between grid points instead of restarting from zero.
std::vector<double> cumulative_fraction_uniform(const std::vector<double>& ts, double w,
                                                const ChannelParams& params);

/// Asymptotic absorbed fraction H_u,inf(w) in [0, r_R/r_0], evaluated in the
/// factored form r_R w e^{-beta} / (r_0 D (gamma + sqrt(k_d/D))), which is
/// exact for every k_d >= 0 and has no zeta division.
double asymptotic_fraction_uniform(double w, const ChannelParams& params);

/// Channel response of a patchy receiver: capacitance -> effective rate ->
/// uniform-rate formulas evaluated at w_e.
struct MultiPatchCir {
    double G_p = 0.0;      // um
    double w_e = 0.0;      // um/s
    double h_p = 0.0;      // 1/s
    double H_p = 0.0;      // fraction
    double H_p_inf = 0.0;  // fraction
};

MultiPatchCir multi_patch_cir(double t, const PatchLayout& layout,
                              const ChannelParams& params);

}  // namespace patchyrx

#endif

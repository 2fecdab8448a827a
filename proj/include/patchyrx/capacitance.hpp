#ifndef PATCHYRX_CAPACITANCE_HPP
#define PATCHYRX_CAPACITANCE_HPP

#include <string>
#include <vector>

#include "patchyrx/geometry.hpp"

namespace patchyrx {

/// Intermediate quantities of the matched-asymptotic capacitance expansion.
/// kappa is set by the first patch (kappa = a_1 / r_R), so layouts carry a
/// stable patch ordering; reordering patches only moves rounding at the
/// 1e-15 level.
struct CapacitanceExpansionTerms {
    double kappa = 0.0;
    std::vector<double> m;                        // m_i = 2 a_i / (r_R kappa pi)
    double m_bar = 0.0;                           // mean of m_i
    std::vector<double> s;                        // s_i = (m_i/2)(ln(4 a_i/(r_R kappa)) - 3/2)
    double vartheta = 0.0;                        // (sum m_i^2)^2/(N_p m_bar) - sum m_i^3
    std::vector<std::vector<double>> pairwise_F;  // symmetric, diagonal unused
};

CapacitanceExpansionTerms compute_expansion_terms(const PatchLayout& layout);

/// Pairwise interaction kernel 1/d + (1/2) ln d - (1/2) ln(2 + d) for unit
/// center directions at chord distance d = |l_i' - l_j'|.
/// Coincident inputs raise SingularGeometry.
double pair_interaction(const Vec3& l_i_prime, const Vec3& l_j_prime);

/// Capacitance G_p (um) of a heterogeneous patch set, truncated expansion
/// through the (kappa ln(kappa/2))^2 cross term. Values outside (0, r_R)
/// raise ExpansionOutOfRange rather than being clamped.
double capacitance_general(const PatchLayout& layout);

/// Equal-radius specialization; radii must agree to 1e-12 relative.
double capacitance_identical(const PatchLayout& layout);

/// Single-patch high-order expansion including the kappa^2 correction.
double capacitance_single(double a, double r_R);

/// Fully absorbing sphere: G_a = r_R.
double capacitance_full_sphere(double r_R);

/// Steady-state diffusion current I = 4 pi D_sigma G C_0 (molecules/s).
double diffusion_current(double G, double D_sigma, double C_0);

/// Homogenized surface reaction rate w_e = D_sigma G_p / (r_R (r_R - G_p)),
/// um/s. Requires 0 < G_p < r_R.
double effective_rate(double G_p, double D_sigma, double r_R);

/// Picks the expansion matching the layout shape: single patch uses the
/// high-order single-disc formula, equal radii the identical-size form, and
/// anything else the general heterogeneous expansion.
double capacitance_for_layout(const PatchLayout& layout);

/// Non-empty when the truncated expansion is being used outside its comfort
/// zone (kappa > 0.3 or coverage > 0.2); empty otherwise.
std::string expansion_warning(const PatchLayout& layout);

/// Derived capacitance and effective rate for a layout.
struct EffectiveChannel {
    double G_p = 0.0;  // um
    double w_e = 0.0;  // um/s
};

EffectiveChannel effective_channel(const PatchLayout& layout, double D_sigma);

}  // namespace patchyrx

#endif

#include "patchyrx/capacitance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchyrx/errors.hpp"

namespace patchyrx {

namespace {

bool radii_all_equal(const PatchLayout& layout) {
    const double a0 = layout.patches.front().a;
    for (const Patch& p : layout.patches) {
        if (std::fabs(p.a - a0) > 1e-12 * a0) return false;
    }
    return true;
}

void check_capacitance_range(double G_p, double r_R, const char* where) {
    if (!(G_p > 0.0 && G_p < r_R)) {
        throw ExpansionOutOfRange(std::string(where) +
                                  ": truncated expansion gave G_p = " + std::to_string(G_p) +
                                  " outside (0, r_R); asymptotics invalid for this layout");
    }
}

}  // namespace

double pair_interaction(const Vec3& l_i_prime, const Vec3& l_j_prime) {
    const double d = (l_i_prime - l_j_prime).norm();
    if (d == 0.0)
        throw SingularGeometry("pair_interaction: coincident patch centers");
    return 1.0 / d + 0.5 * std::log(d) - 0.5 * std::log(2.0 + d);
}

CapacitanceExpansionTerms compute_expansion_terms(const PatchLayout& layout) {
    const std::size_t n = layout.patches.size();
    CapacitanceExpansionTerms terms;
    terms.kappa = layout.patches.front().a / layout.r_R;
    terms.m.resize(n);
    terms.s.resize(n);
    const double denom = layout.r_R * terms.kappa * M_PI;
    double m_sum = 0.0;
    double m2_sum = 0.0;
    double m3_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a_i = layout.patches[i].a;
        const double m_i = 2.0 * a_i / denom;
        terms.m[i] = m_i;
        terms.s[i] = 0.5 * m_i * (std::log(4.0 * a_i / (layout.r_R * terms.kappa)) - 1.5);
        m_sum += m_i;
        m2_sum += m_i * m_i;
        m3_sum += m_i * m_i * m_i;
    }
    terms.m_bar = m_sum / static_cast<double>(n);
    terms.vartheta = m2_sum * m2_sum / (static_cast<double>(n) * terms.m_bar) - m3_sum;
    terms.pairwise_F.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double F = pair_interaction(layout.patches[i].center, layout.patches[j].center);
            terms.pairwise_F[i][j] = F;
            terms.pairwise_F[j][i] = F;
        }
    }
    return terms;
}

double capacitance_general(const PatchLayout& layout) {
    const CapacitanceExpansionTerms t = compute_expansion_terms(layout);
    const double n = static_cast<double>(layout.patches.size());
    const double kappa = t.kappa;
    const double log_half_kappa = std::log(kappa / 2.0);

    double m2_sum = 0.0;
    double ms_sum = 0.0;
    for (std::size_t i = 0; i < t.m.size(); ++i) {
        m2_sum += t.m[i] * t.m[i];
        ms_sum += t.m[i] * t.s[i];
    }
    double cross_sum = 0.0;
    for (std::size_t i = 0; i + 1 < t.m.size(); ++i) {
        for (std::size_t j = i + 1; j < t.m.size(); ++j) {
            cross_sum += t.m[i] * t.m[j] * t.pairwise_F[i][j];
        }
    }

    const double bracket = 1.0 + kappa / (2.0 * n * t.m_bar) * log_half_kappa * m2_sum +
                           kappa / (n * t.m_bar) * (ms_sum + 2.0 * cross_sum) +
                           kappa * kappa * log_half_kappa * log_half_kappa * t.vartheta /
                               (4.0 * n * t.m_bar);
    const double inv_G = 2.0 / (n * t.m_bar * kappa * layout.r_R) * bracket;
    const double G_p = 1.0 / inv_G;
    check_capacitance_range(G_p, layout.r_R, "capacitance_general");
    return G_p;
}

double capacitance_identical(const PatchLayout& layout) {
    if (!radii_all_equal(layout))
        throw std::invalid_argument("capacitance_identical: patch radii differ");
    const double a = layout.patches.front().a;
    const double r_R = layout.r_R;
    const double kappa = a / r_R;
    const double n = static_cast<double>(layout.patches.size());

    double F_sum = 0.0;
    for (std::size_t i = 0; i + 1 < layout.patches.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.patches.size(); ++j) {
            F_sum += pair_interaction(layout.patches[i].center, layout.patches[j].center);
        }
    }
    const double bracket = 1.0 + kappa / M_PI * (std::log(2.0 * kappa) - 1.5) +
                           4.0 * kappa / (M_PI * n) * F_sum;
    const double inv_G = M_PI / (n * kappa * r_R) * bracket;
    const double G_p = 1.0 / inv_G;
    check_capacitance_range(G_p, r_R, "capacitance_identical");
    return G_p;
}

double capacitance_single(double a, double r_R) {
    if (!(r_R > 0.0) || !(a > 0.0 && a < r_R))
        throw std::invalid_argument("capacitance_single: requires 0 < a < r_R");
    const double kappa = a / r_R;
    const double bracket = 1.0 + kappa / M_PI * (std::log(2.0 * kappa) - 1.5) -
                           kappa * kappa / (M_PI * M_PI) * (M_PI * M_PI + 21.0) / 36.0;
    const double G_p = kappa * r_R / M_PI / bracket;
    check_capacitance_range(G_p, r_R, "capacitance_single");
    return G_p;
}

double capacitance_full_sphere(double r_R) {
    if (!(r_R > 0.0)) throw std::invalid_argument("capacitance_full_sphere: r_R must be > 0");
    return r_R;
}

double diffusion_current(double G, double D_sigma, double C_0) {
    if (!(G >= 0.0)) throw std::invalid_argument("diffusion_current: G must be >= 0");
    if (!(D_sigma > 0.0) || !(C_0 > 0.0))
        throw std::invalid_argument("diffusion_current: D_sigma and C_0 must be > 0");
    return 4.0 * M_PI * D_sigma * G * C_0;
}

double effective_rate(double G_p, double D_sigma, double r_R) {
    if (!(D_sigma > 0.0) || !(r_R > 0.0))
        throw std::invalid_argument("effective_rate: D_sigma and r_R must be > 0");
    if (!(G_p > 0.0 && G_p < r_R))
        throw std::invalid_argument("effective_rate: requires 0 < G_p < r_R");
    return D_sigma * G_p / (r_R * (r_R - G_p));
}

double capacitance_for_layout(const PatchLayout& layout) {
    if (layout.patches.size() == 1)
        return capacitance_single(layout.patches.front().a, layout.r_R);
    if (radii_all_equal(layout)) return capacitance_identical(layout);
    return capacitance_general(layout);
}

std::string expansion_warning(const PatchLayout& layout) {
    double kappa_max = 0.0;
    for (const Patch& p : layout.patches) kappa_max = std::max(kappa_max, p.a / layout.r_R);
    if (kappa_max > 0.3) {
        return "expansion degrades: max patch kappa = " + std::to_string(kappa_max) +
               " exceeds 0.3";
    }
    if (layout.coverage > 0.2) {
        return "expansion degrades: coverage = " + std::to_string(layout.coverage) +
               " exceeds 0.2";
    }
    return {};
}

EffectiveChannel effective_channel(const PatchLayout& layout, double D_sigma) {
    EffectiveChannel ch;
    ch.G_p = capacitance_for_layout(layout);
    ch.w_e = effective_rate(ch.G_p, D_sigma, layout.r_R);
    return ch;
}

}  // namespace patchyrx

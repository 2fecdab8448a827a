#include "patchyrx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "patchyrx/errors.hpp"

namespace patchyrx {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double reduce_to_two_pi(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

double golden_azimuth(double index) {
    // 4 pi k / (1 + sqrt(5)), reduced to [0, 2 pi)
    static const double step = 4.0 * M_PI / (1.0 + std::sqrt(5.0));
    return reduce_to_two_pi(index * step);
}

double equal_patch_radius(int N_p, double A, double r_R) {
    return 2.0 * r_R * std::sqrt(A / static_cast<double>(N_p));
}

void check_generator_args(int N_p, double A, double r_R) {
    if (N_p < 1) throw std::invalid_argument("layout generator: N_p must be >= 1");
    if (!(A > 0.0 && A < 1.0))
        throw std::invalid_argument("layout generator: coverage A must be in (0, 1)");
    if (!(r_R > 0.0)) throw std::invalid_argument("layout generator: r_R must be > 0");
}

// First pair violating the strict separation requirement, if any.
struct OverlapPair {
    int i;
    int j;
};

bool find_overlap(const std::vector<Patch>& patches, OverlapPair& out) {
    for (std::size_t i = 0; i + 1 < patches.size(); ++i) {
        for (std::size_t j = i + 1; j < patches.size(); ++j) {
            const double sep = angle_between(patches[i].center, patches[j].center);
            if (!(sep > patches[i].alpha + patches[j].alpha)) {
                out = {static_cast<int>(i), static_cast<int>(j)};
                return true;
            }
        }
    }
    return false;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(norm2()); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Vec3::normalized: zero vector");
    return {x / n, y / n, z / n};
}

double angle_between(const Vec3& u, const Vec3& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

Vec3 direction_from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

void ChannelParams::validate() const {
    if (!(D_sigma > 0.0)) throw std::invalid_argument("ChannelParams: D_sigma must be > 0");
    if (!(r_R > 0.0)) throw std::invalid_argument("ChannelParams: r_R must be > 0");
    if (!(r_0 > r_R)) throw std::invalid_argument("ChannelParams: r_0 must exceed r_R");
    if (!(k_d >= 0.0)) throw std::invalid_argument("ChannelParams: k_d must be >= 0");
    if (N_sigma < 1) throw std::invalid_argument("ChannelParams: N_sigma must be >= 1");
    if (!(C_0 > 0.0)) throw std::invalid_argument("ChannelParams: C_0 must be > 0");
}

Patch make_patch(double theta, double phi, double a, double r_R) {
    if (!(r_R > 0.0)) throw std::invalid_argument("make_patch: r_R must be > 0");
    if (!(a > 0.0 && a < r_R))
        throw std::invalid_argument("make_patch: patch radius must satisfy 0 < a < r_R");
    Patch p;
    p.center = direction_from_angles(theta, phi);
    p.a = a;
    p.alpha = std::asin(a / r_R);
    return p;
}

PatchLayout make_layout(double r_R, std::vector<Patch> patches) {
    if (!(r_R > 0.0)) throw std::invalid_argument("make_layout: r_R must be > 0");
    if (patches.empty()) throw std::invalid_argument("make_layout: patch list is empty");
    double area_sum = 0.0;
    for (const Patch& p : patches) {
        if (!(p.a > 0.0 && p.a < r_R))
            throw std::invalid_argument("make_layout: patch radius must satisfy 0 < a < r_R");
        if (std::fabs(p.center.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("make_layout: patch center is not a unit vector");
        if (std::fabs(p.alpha - std::asin(p.a / r_R)) > 1e-12)
            throw std::invalid_argument("make_layout: patch alpha inconsistent with arcsin(a/r_R)");
        area_sum += p.a * p.a;
    }
    OverlapPair bad{};
    if (find_overlap(patches, bad)) {
        throw InfeasibleLayout("make_layout: patches " + std::to_string(bad.i) + " and " +
                               std::to_string(bad.j) + " overlap");
    }
    PatchLayout layout;
    layout.r_R = r_R;
    layout.patches = std::move(patches);
    layout.coverage = area_sum / (4.0 * r_R * r_R);
    return layout;
}

PatchLayout fibonacci_layout(int N_p, double A, double r_R) {
    check_generator_args(N_p, A, r_R);
    if (N_p % 2 == 0)
        throw std::invalid_argument("fibonacci_layout: N_p must be odd");
    const double a = equal_patch_radius(N_p, A, r_R);
    if (!(a < r_R))
        throw InfeasibleLayout("fibonacci_layout: per-patch radius reaches the sphere radius");
    const int B = (N_p - 1) / 2;
    std::vector<Patch> patches;
    patches.reserve(static_cast<std::size_t>(N_p));
    for (int i = 1; i <= N_p; ++i) {
        const double k = static_cast<double>(i - B - 1);
        const double theta = M_PI / 2.0 - std::asin(2.0 * k / static_cast<double>(N_p));
        patches.push_back(make_patch(theta, golden_azimuth(k), a, r_R));
    }
    return make_layout(r_R, std::move(patches));
}

PatchLayout random_layout(int N_p, double A, double r_R, std::uint64_t seed) {
    check_generator_args(N_p, A, r_R);
    const double a = equal_patch_radius(N_p, A, r_R);
    if (!(a < r_R))
        throw InfeasibleLayout("random_layout: per-patch radius reaches the sphere radius");
    const double alpha = std::asin(a / r_R);
    Rng rng(seed);
    constexpr int kMaxAttempts = 1000000;
    std::vector<Patch> patches(static_cast<std::size_t>(N_p));
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (Patch& p : patches) {
            const double z = 1.0 - 2.0 * rng.next_double();
            const double phi = kTwoPi * rng.next_double();
            const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
            p.center = {rxy * std::cos(phi), rxy * std::sin(phi), z};
            p.a = a;
            p.alpha = alpha;
        }
        OverlapPair bad{};
        if (!find_overlap(patches, bad)) return make_layout(r_R, std::move(patches));
    }
    throw InfeasibleLayout("random_layout: no non-overlapping placement found in 1000000 attempts");
}

PatchLayout region_layout(int N_p, double A, double r_R, double cap_center_theta,
                          double cap_angular_radius) {
    check_generator_args(N_p, A, r_R);
    if (!(cap_angular_radius > 0.0 && cap_angular_radius <= M_PI))
        throw std::invalid_argument("region_layout: cap radius must be in (0, pi]");
    if (!(cap_center_theta >= 0.0 && cap_center_theta <= M_PI))
        throw std::invalid_argument("region_layout: cap center theta must be in [0, pi]");
    const double a = equal_patch_radius(N_p, A, r_R);
    if (!(a < r_R))
        throw InfeasibleLayout("region_layout: per-patch radius reaches the sphere radius");
    const double alpha = std::asin(a / r_R);
    // Patch centers may range over the shrunken cap of radius rho so whole
    // patches stay inside the requested region.
    const double rho = cap_angular_radius - alpha;
    if (!(rho >= 0.0))
        throw InfeasibleLayout("region_layout: region smaller than a single patch");

    const double ct = std::cos(cap_center_theta);
    const double st = std::sin(cap_center_theta);
    std::vector<Patch> patches;
    patches.reserve(static_cast<std::size_t>(N_p));
    if (N_p == 1) {
        patches.push_back(make_patch(cap_center_theta, 0.0, a, r_R));
        return make_layout(r_R, std::move(patches));
    }
    for (int i = 1; i <= N_p; ++i) {
        // Cap-area-uniform spiral: colatitude from the cap axis grows with
        // equal solid-angle increments, azimuth follows the golden step.
        const double u = (static_cast<double>(i) - 0.5) / static_cast<double>(N_p);
        const double psi = std::acos(1.0 - (1.0 - std::cos(rho)) * u);
        const double phi = golden_azimuth(static_cast<double>(i - 1));
        const double sp = std::sin(psi);
        const Vec3 local{sp * std::cos(phi), sp * std::sin(phi), std::cos(psi)};
        // Rotate the cap frame's +z onto the cap axis (rotation about y).
        Vec3 dir{ct * local.x + st * local.z, local.y, -st * local.x + ct * local.z};
        Patch p;
        p.center = dir.normalized();
        p.a = a;
        p.alpha = alpha;
        patches.push_back(p);
    }
    return make_layout(r_R, std::move(patches));
}

PatchLayout explicit_layout(const std::vector<std::array<double, 3>>& descriptors,
                            double r_R) {
    if (!(r_R > 0.0)) throw std::invalid_argument("explicit_layout: r_R must be > 0");
    if (descriptors.empty())
        throw std::invalid_argument("explicit_layout: descriptor list is empty");
    std::vector<Patch> patches;
    patches.reserve(descriptors.size());
    for (const auto& d : descriptors) {
        if (!(d[2] > 0.0) || d[2] >= r_R)
            throw std::invalid_argument("explicit_layout: patch radius must satisfy 0 < a < r_R");
        patches.push_back(make_patch(d[0], d[1], d[2], r_R));
    }
    return make_layout(r_R, std::move(patches));
}

bool point_in_patch(const Vec3& p, const Patch& patch) {
    if (std::fabs(p.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("point_in_patch: p is not a unit vector");
    // Boundary inclusive; the 1e-12 slack keeps points constructed to sit
    // exactly on the rim inside regardless of rounding direction.
    return angle_between(p, patch.center) <= patch.alpha + 1e-12;
}

Vec3 uniform_tx_location(double r_0, Rng& rng) {
    if (!(r_0 > 0.0)) throw std::invalid_argument("uniform_tx_location: r_0 must be > 0");
    const double z = 1.0 - 2.0 * rng.next_double();
    const double phi = kTwoPi * rng.next_double();
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3{rxy * std::cos(phi), rxy * std::sin(phi), z} * r_0;
}

PatchLayout layout_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("r_R")) throw std::invalid_argument("layout JSON: missing \"r_R\"");
    if (!j.contains("patches") || !j["patches"].is_array())
        throw std::invalid_argument("layout JSON: missing \"patches\" array");
    const double r_R = j["r_R"].get<double>();
    std::vector<Patch> patches;
    patches.reserve(j["patches"].size());
    for (const auto& jp : j["patches"]) {
        for (const char* key : {"theta", "phi", "a"}) {
            if (!jp.contains(key))
                throw std::invalid_argument(std::string("layout JSON: patch missing \"") + key + "\"");
        }
        patches.push_back(make_patch(jp["theta"].get<double>(), jp["phi"].get<double>(),
                                     jp["a"].get<double>(), r_R));
    }
    return make_layout(r_R, std::move(patches));
}

std::string layout_to_json(const PatchLayout& layout) {
    nlohmann::json j;
    j["r_R"] = layout.r_R;
    j["patches"] = nlohmann::json::array();
    for (const Patch& p : layout.patches) {
        const double theta = std::acos(std::clamp(p.center.z, -1.0, 1.0));
        const double phi = reduce_to_two_pi(std::atan2(p.center.y, p.center.x));
        j["patches"].push_back({{"theta", theta}, {"phi", phi}, {"a", p.a}});
    }
    return j.dump(2) + "\n";
}

}  // namespace patchyrx

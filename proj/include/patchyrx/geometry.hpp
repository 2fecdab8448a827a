#ifndef PATCHYRX_GEOMETRY_HPP
#define PATCHYRX_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "patchyrx/rng.hpp"

namespace patchyrx {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const;
    Vec3 normalized() const;
};

/// Angle in [0, pi] between two vectors, computed from atan2 of the cross and
/// dot products so that nearly parallel directions keep full precision.
double angle_between(const Vec3& u, const Vec3& v);

/// Unit direction for polar angle theta (from +z) and azimuth phi.
Vec3 direction_from_angles(double theta, double phi);

/// Physical constants of one transmitter-receiver link.
/// Units: D_sigma um^2/s, k_d 1/s, r_R um, r_0 um, C_0 molecules/um^3.
struct ChannelParams {
    double D_sigma = 79.4;
    double k_d = 0.8;
    double r_R = 10.0;
    double r_0 = 20.0;
    std::int64_t N_sigma = 1000;
    double C_0 = 1.0;

    /// Throws std::invalid_argument unless D_sigma > 0, r_R > 0, r_0 > r_R,
    /// k_d >= 0, N_sigma >= 1 and C_0 > 0.
    void validate() const;
};

/// Circular absorbing patch on the receiver sphere: disc radius `a` (um) and
/// the spherical cap of angular radius alpha = arcsin(a / r_R) around
/// `center` (unit vector) that realizes it as an on-sphere region.
struct Patch {
    Vec3 center;
    double a = 0.0;
    double alpha = 0.0;
};

/// Non-overlapping patch set on a sphere of radius r_R. `coverage` is the
/// flat-disc area ratio sum(a_i^2) / (4 r_R^2), always recomputed from the
/// patch list rather than trusted from input.
struct PatchLayout {
    double r_R = 0.0;
    std::vector<Patch> patches;
    double coverage = 0.0;
};

/// Builds a Patch at (theta, phi) and checks 0 < a < r_R.
Patch make_patch(double theta, double phi, double a, double r_R);

/// Validates patch invariants plus pairwise non-overlap (center separation
/// strictly greater than alpha_i + alpha_j) and fills in coverage.
/// Throws InfeasibleLayout naming the first offending pair on overlap.
PatchLayout make_layout(double r_R, std::vector<Patch> patches);

/// N_p equal-radius patches at Fibonacci-lattice directions,
///   theta_i = pi/2 - arcsin(2 (i - B - 1) / N_p),  B = (N_p - 1) / 2,
///   phi_i = 4 pi (i - B - 1) / (1 + sqrt(5))  (reduced to [0, 2 pi)),
/// with a = 2 r_R sqrt(A / N_p) so the coverage comes out to A.
/// N_p must be odd and positive.
PatchLayout fibonacci_layout(int N_p, double A, double r_R);

/// N_p equal-radius patches with centers uniform on the sphere conditioned on
/// non-overlap: whole candidate sets are redrawn until one is overlap-free,
/// up to 10^6 attempts. Deterministic for a fixed seed.
PatchLayout random_layout(int N_p, double A, double r_R, std::uint64_t seed);

/// N_p equal-radius patches spread evenly inside the spherical cap of angular
/// radius cap_angular_radius centered at polar angle cap_center_theta
/// (azimuth 0). Patch centers stay at least alpha inside the cap edge so each
/// whole patch fits in the region.
PatchLayout region_layout(int N_p, double A, double r_R, double cap_center_theta,
                          double cap_angular_radius);

/// Layout exactly as described by (theta, phi, a) triples.
/// a >= r_R is an invalid-argument error here (not an infeasibility).
PatchLayout explicit_layout(const std::vector<std::array<double, 3>>& descriptors,
                            double r_R);

/// True iff the angle between p and the patch center is <= alpha (boundary
/// inclusive). p must be unit length within 1e-9.
bool point_in_patch(const Vec3& p, const Patch& patch);

/// Point uniformly distributed on the sphere of radius r_0 around the origin.
Vec3 uniform_tx_location(double r_0, Rng& rng);

/// JSON round trip, schema:
///   { "r_R": <um>, "patches": [ { "theta": <rad>, "phi": <rad>, "a": <um> } ] }
PatchLayout layout_from_json(const std::string& text);
std::string layout_to_json(const PatchLayout& layout);

}  // namespace patchyrx

#endif

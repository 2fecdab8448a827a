#ifndef PATCHYRX_ERRORS_HPP
#define PATCHYRX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace patchyrx {

// A requested patch arrangement cannot satisfy the non-overlap constraint
// (or placement gave up after the attempt cap).
class InfeasibleLayout : public std::runtime_error {
public:
    explicit InfeasibleLayout(const std::string& what) : std::runtime_error(what) {}
};

// Geometric degenerate input, e.g. coincident patch centers in the pairwise
// interaction kernel.
class SingularGeometry : public std::runtime_error {
public:
    explicit SingularGeometry(const std::string& what) : std::runtime_error(what) {}
};

// The truncated capacitance expansion produced a value outside (0, r_R);
// the asymptotic series is not valid for this layout. Never clamped.
class ExpansionOutOfRange : public std::runtime_error {
public:
    explicit ExpansionOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace patchyrx

#endif

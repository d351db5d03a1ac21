#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hyperzero/hypgeom.hpp"
#include "hyperzero/series.hpp"

namespace hyperzero {

struct RootConfig {
    double residual_tolerance = 1e-8;
    int max_iterations = 200;
    int quadrature_nodes = 256;

    void validate() const;
};

enum class RootMethod { GlobalRoots, ArgumentPrinciple };

struct Zero {
    DiskPoint location;
    double residual = 0.0;
    int multiplicity = 1;
};

struct ZeroSet {
    std::vector<Zero> zeros;
    double search_radius = 0.0;
    RootMethod method = RootMethod::GlobalRoots;
    /// Clusters merged into a multiple zero. Probability zero for the laws
    /// used here, so any nonzero value is worth a look.
    std::size_t multiplicity_anomalies = 0;

    /// Number of zeros counted with multiplicity.
    std::size_t count() const;
    std::size_t count_in_ball(Complex center, double radius) const;
};

/// Clustering distance for reporting multiple zeros.
inline constexpr double kMultiplicityClusterRadius = 1e-9;
/// Trailing coefficients below this fraction of max |c_k| are dropped before solving.
inline constexpr double kTrimRelativeTolerance = 1e-14;

/// max_k |c_k| r^k.
double coefficient_scale(std::span<Complex const> coefficients, double radius);

/// All roots of sum_k c_k z^k (after trimming negligible trailing coefficients),
/// by Aberth-Ehrlich simultaneous iteration. Exact leading zero coefficients
/// contribute roots at the origin. Throws DegenerateInput if every coefficient
/// vanishes and NonConvergence if the iteration budget runs out.
std::vector<Complex> polynomial_roots(std::span<Complex const> coefficients, RootConfig const& config = {});

/// Zeros of the truncated series with modulus <= search_radius, Newton polished
/// and certified against residual_tolerance * coefficient_scale.
ZeroSet find_roots(TruncatedSeries const& series, double search_radius, RootConfig const& config = {});

/// Number of zeros (with multiplicity) of g(z) = f(mobius(u, z)) (or of f when u
/// is absent) in the ball |z - center| < radius, by trapezoidal quadrature of
/// g'/g on the boundary circle.
///
/// Throws ContourTooClose when |g| on the contour falls to rounding level and
/// QuadratureUnresolved when three node doublings still leave the sum away
/// from an integer.
int count_zeros_in_disk(TruncatedSeries const& series, DiskPoint center, double radius,
                        std::optional<DiskPoint> u = std::nullopt, RootConfig const& config = {});

}  // namespace hyperzero

#pragma once

// Monte Carlo statistics of the zero set of z -> f(X, mobius(u, z)): joint
// ball-hit probabilities, their eps^(-2n) scaling limit, the first intensity,
// the real linear statistic of the normalized field, and two-parameter
// independence.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperzero/coeffs.hpp"
#include "hyperzero/hypgeom.hpp"
#include "hyperzero/roots.hpp"
#include "hyperzero/series.hpp"

namespace hyperzero {

/// Writes coefficients first .. first + out.size() - 1 of the trial's series.
using CoefficientSource =
    std::function<void(SeededStream const& stream, std::size_t first, std::span<Complex> out)>;

CoefficientSource law_source(CoefficientLaw const& law);

/// Shared knobs of every estimator.
struct RunOptions {
    unsigned threads = 1;
    double tail_tolerance = TruncationPolicy::kDefaultTailTolerance;
    double safety_factor = TruncationPolicy::kDefaultSafetyFactor;
    RootConfig roots;
    /// Hashed into per-trial stream indices together with `cell`.
    std::string experiment = "default";
    std::uint64_t cell = 0;

    static RunOptions defaults();  // threads from HYPERZERO_THREADS
    TruncationPolicy policy(double radius) const { return {radius, tail_tolerance, safety_factor}; }
};

/// Relative amplitude of the deterministic radius jitter applied when a zero
/// sits on a counting contour.
inline constexpr double kContourJitter = 0.01;
inline constexpr int kMaxJitterAttempts = 4;

/// Pairwise disjoint open balls U(z_i, eps), all inside the unit disk.
class BallFamily {
public:
    BallFamily(std::vector<DiskPoint> centers, double epsilon);

    std::vector<DiskPoint> const& centers() const noexcept { return centers_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t size() const noexcept { return centers_.size(); }

private:
    std::vector<DiskPoint> centers_;
    double epsilon_;
};

struct EstimateParams {
    std::string law;
    DiskPoint u;
    double epsilon = 0.0;
    std::vector<DiskPoint> centers;
    std::uint64_t seed = 0;
    std::size_t truncation_degree = 0;
};

struct CorrelationEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sqrt(p (1 - p) / trials)
    std::size_t trials = 0;
    std::size_t hits = 0;
    EstimateParams params;
};

/// Probability that every ball contains a zero of z -> f(X, mobius(u, z)).
CorrelationEstimate joint_hit_probability(CoefficientLaw const& law, DiskPoint u, BallFamily const& balls,
                                          std::size_t trials, std::uint64_t seed,
                                          RunOptions const& options = RunOptions::defaults());

/// Same estimator over an arbitrary coefficient source (e.g. a fixed polynomial).
CorrelationEstimate joint_hit_probability(CoefficientSource const& source, std::string const& source_name,
                                          DiskPoint u, BallFamily const& balls, std::size_t trials,
                                          std::uint64_t seed, RunOptions const& options = RunOptions::defaults());

struct CorrelationCell {
    DiskPoint u;
    double epsilon = 0.0;
    CorrelationEstimate estimate;
    double scaled_value = 0.0;      // eps^(-2n) p
    double scaled_std_error = 0.0;
};

struct CorrelationLimitReport {
    std::size_t points = 0;  // n
    std::vector<CorrelationCell> cells;
    bool extrapolated = false;
    double value = 0.0;
    double statistical_error = 0.0;
    double extrapolation_error = 0.0;

    double combined_error() const;
};

inline constexpr std::size_t kMinHitsPerCell = 25;

/// eps^(-2n) P(all balls hit) over the (u, eps) grid, extrapolated linearly in
/// eps^2 to eps -> 0 at the largest |u|. Cell (i_u, i_eps) uses cell index
/// options.cell + i_u * |eps| + i_eps.
CorrelationLimitReport correlation_limit(CoefficientLaw const& law, std::span<DiskPoint const> u_sequence,
                                         std::span<double const> epsilons,
                                         std::span<DiskPoint const> centers, std::size_t trials,
                                         std::uint64_t seed, RunOptions const& options = RunOptions::defaults());

/// The grid half of correlation_limit: one cell per (u, eps), u-major.
std::vector<CorrelationCell> correlation_grid(CoefficientLaw const& law, std::span<DiskPoint const> u_sequence,
                                              std::span<double const> epsilons,
                                              std::span<DiskPoint const> centers, std::size_t trials,
                                              std::uint64_t seed, RunOptions const& options = RunOptions::defaults());

/// The extrapolation half: throws InsufficientHits if any cell has fewer than
/// kMinHitsPerCell hits, then fits the last row (largest |u|).
CorrelationLimitReport extrapolate_correlation_limit(std::vector<CorrelationCell> cells, std::size_t points,
                                                     std::size_t epsilon_count);

struct RadialBin {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double expected_count_per_area = 0.0;
    double std_error = 0.0;
    double mean_count = 0.0;
    double mean_count_std_error = 0.0;
};

struct IntensityProfile {
    std::vector<RadialBin> radial_bins;
    std::size_t trials = 0;
    double total_mean_count = 0.0;
    double total_std_error = 0.0;
    RootMethod method = RootMethod::GlobalRoots;
    std::size_t truncation_degree = 0;
};

/// Truncations up to this degree are solved globally; beyond it zeros are counted.
inline constexpr std::size_t kGlobalRootsMaxDegree = 512;

/// Expected number of zeros of z -> f(X, mobius(u, z)) per unit area in
/// equal-width annuli of |z| <= search_radius.
IntensityProfile intensity_profile(CoefficientLaw const& law, DiskPoint u, double search_radius,
                                   std::size_t bins, std::size_t trials, std::uint64_t seed,
                                   RunOptions const& options = RunOptions::defaults());

/// Expected Gaussian zero count in |z| < r: r^2 / (1 - r^2).
double gaussian_expected_count(double radius);

struct CltSummary {
    std::size_t samples = 0;
    double sigma2 = 0.0;  // (1/2) sum_ij lambda_i conj(lambda_j) / (1 - z_i conj(z_j))
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    std::optional<double> ks_distance;  // absent when sigma2 == 0
    std::size_t truncation_degree = 0;
};

/// Samples Re[sum_i lambda_i f(X, mobius(u, z_i)) / delta(u, z_i)] and measures
/// its Kolmogorov-Smirnov distance to Normal(0, sigma2).
CltSummary clt_statistic_sample(CoefficientLaw const& law, DiskPoint u, std::span<DiskPoint const> points,
                                std::span<Complex const> lambdas, std::size_t samples, std::uint64_t seed,
                                RunOptions const& options = RunOptions::defaults());

struct IndependenceReport {
    DiskPoint u1;
    DiskPoint u2;
    DiskPoint center;
    double epsilon = 0.0;
    std::size_t trials = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    double indicator_covariance = 0.0;
    double indicator_covariance_se = 0.0;
    double indicator_correlation = 0.0;  // NaN if either indicator is constant
    double indicator_correlation_se = 0.0;
    Complex field_covariance;
    double field_covariance_se_re = 0.0;
    double field_covariance_se_im = 0.0;
    Complex predicted_field_covariance;
    double pseudo_hyperbolic_distance = 0.0;
    std::size_t truncation_degree = 0;
};

/// Covariance of the ball-hit indicators at parameters u1 and u2 on shared
/// coefficient samples, plus the field-level covariance at the ball center.
IndependenceReport independence_experiment(CoefficientLaw const& law, DiskPoint u1, DiskPoint u2,
                                           DiskPoint center, double epsilon, std::size_t trials,
                                           std::uint64_t seed, RunOptions const& options = RunOptions::defaults());

double normal_cdf(double x, double sigma);

/// sup_x |F_n(x) - Phi(x / sigma)|; sorts a copy of the samples.
double ks_distance_normal(std::span<double const> samples, double sigma);

}  // namespace hyperzero

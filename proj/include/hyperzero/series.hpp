#pragma once

// Truncated random power series f(X, z) = sum_k X_k z^k with a mean-square
// tail certificate on a sub-disk.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperzero/coeffs.hpp"
#include "hyperzero/hypgeom.hpp"

namespace hyperzero {

struct TruncationPolicy {
    static constexpr double kDefaultTailTolerance = 1e-10;
    static constexpr double kDefaultSafetyFactor = 10.0;

    double target_radius = 0.5;
    double tail_tolerance = kDefaultTailTolerance;
    double safety_factor = kDefaultSafetyFactor;

    /// Throws PolicyInfeasible for target_radius >= 1, PreconditionError otherwise.
    void validate() const;
};

/// r^(N+1) / sqrt(1 - r^2): root-mean-square of the tail beyond degree N, uniformly on |z| <= r.
double tail_rms_bound(double radius, std::size_t degree);

/// Smallest N with safety * r^(N+1) / sqrt(1 - r^2) <= tail_tolerance.
std::size_t required_degree(TruncationPolicy const& policy);

class TruncatedSeries {
public:
    /// Samples the first required_degree(policy) + 1 coefficients of the stream.
    static TruncatedSeries sample(CoefficientLaw const& law, SeededStream const& stream,
                                  TruncationPolicy const& policy);

    /// Wraps explicit coefficients, certified on |z| <= tail_radius with the
    /// default safety factor.
    static TruncatedSeries from_coefficients(std::vector<Complex> coefficients, double tail_radius);

    std::span<Complex const> coefficients() const noexcept { return coefficients_; }
    std::size_t degree() const noexcept { return coefficients_.empty() ? 0 : coefficients_.size() - 1; }
    double tail_radius() const noexcept { return tail_radius_; }
    double tail_bound() const noexcept { return tail_bound_; }
    std::optional<CoefficientLaw> const& law() const noexcept { return law_; }
    SeededStream const& stream() const noexcept { return stream_; }
    std::string law_tag() const { return law_ ? law_->name() : std::string("custom"); }

    /// Throws OutOfCertifiedDisk unless |z| <= tail_radius.
    void check_certified(Complex z) const;

private:
    TruncatedSeries(std::vector<Complex> coefficients, std::optional<CoefficientLaw> law,
                    SeededStream stream, double tail_radius, double tail_bound);

    std::vector<Complex> coefficients_;
    std::optional<CoefficientLaw> law_;
    SeededStream stream_;
    double tail_radius_;
    double tail_bound_;
};

/// Horner evaluation of sum_k c_k z^k. No certification check.
Complex horner(std::span<Complex const> coefficients, Complex z);

/// Evaluates the polynomial and its derivative at many points at once.
void horner_with_derivative(std::span<Complex const> coefficients, std::span<Complex const> points,
                            std::span<Complex> values, std::span<Complex> derivatives);

/// f(z) for |z| <= tail_radius; OutOfCertifiedDisk otherwise.
Complex evaluate(TruncatedSeries const& series, Complex z);

/// f(mobius(u, z)) / delta(u, z).
Complex pushforward_evaluate(TruncatedSeries const& series, DiskPoint u, DiskPoint z);

/// alpha_k(u) = sum_i lambda_i mobius(u, z_i)^k / delta(u, z_i), k = 0..degree.
std::vector<Complex> alpha_coefficients(DiskPoint u, std::span<DiskPoint const> points,
                                        std::span<Complex const> lambdas, std::size_t degree);

/// Closed form of sum_k |mobius(u, z)|^(p k) / |delta(u, z)|^p for p in {2, 4}.
double alpha_power_sum(DiskPoint u, DiskPoint z, double p);

/// sum_{i,j} lambda_i conj(lambda_j) q_covariance(z_i, z_j), the u-independent
/// value of sum_k |alpha_k(u)|^2.
double alpha_square_sum_closed_form(std::span<DiskPoint const> points,
                                    std::span<Complex const> lambdas);

}  // namespace hyperzero

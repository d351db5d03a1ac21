#include "hyperzero/series.hpp"

#include <cmath>
#include <sstream>

#include "hyperzero/error.hpp"

namespace hyperzero {

void TruncationPolicy::validate() const
{
    if (target_radius >= 1.0) {
        throw PolicyInfeasible("target radius must be strictly below 1");
    }
    if (!(target_radius >= 0.0)) {
        throw PreconditionError("target radius must be non-negative");
    }
    if (!(tail_tolerance > 0.0)) {
        throw PreconditionError("tail tolerance must be positive");
    }
    if (!(safety_factor >= 1.0)) {
        throw PreconditionError("safety factor must be at least 1");
    }
}

double tail_rms_bound(double radius, std::size_t degree)
{
    return std::pow(radius, static_cast<double>(degree) + 1.0) / std::sqrt(1.0 - radius * radius);
}

std::size_t required_degree(TruncationPolicy const& policy)
{
    policy.validate();
    double const r = policy.target_radius;
    if (r == 0.0) {
        return 0;
    }
    auto admissible = [&](std::size_t n) {
        return policy.safety_factor * tail_rms_bound(r, n) <= policy.tail_tolerance;
    };
    // Solve in logs, then settle the boundary exactly.
    double const target = std::log(policy.tail_tolerance * std::sqrt(1.0 - r * r) / policy.safety_factor);
    double const guess = std::ceil(target / std::log(r)) - 1.0;
    std::size_t n = guess > 0.0 ? static_cast<std::size_t>(guess) : 0;
    while (n > 0 && admissible(n - 1)) {
        --n;
    }
    while (!admissible(n)) {
        ++n;
    }
    return n;
}

TruncatedSeries::TruncatedSeries(std::vector<Complex> coefficients, std::optional<CoefficientLaw> law,
                                 SeededStream stream, double tail_radius, double tail_bound)
    : coefficients_(std::move(coefficients)),
      law_(law),
      stream_(stream),
      tail_radius_(tail_radius),
      tail_bound_(tail_bound)
{
}

TruncatedSeries TruncatedSeries::sample(CoefficientLaw const& law, SeededStream const& stream,
                                        TruncationPolicy const& policy)
{
    std::size_t const n = required_degree(policy);
    return TruncatedSeries(sample_coefficients(law, n + 1, stream), law, stream, policy.target_radius,
                           policy.safety_factor * tail_rms_bound(policy.target_radius, n));
}

TruncatedSeries TruncatedSeries::from_coefficients(std::vector<Complex> coefficients, double tail_radius)
{
    TruncationPolicy{tail_radius}.validate();
    if (coefficients.empty()) {
        coefficients.push_back(0.0);
    }
    double const bound =
        TruncationPolicy::kDefaultSafetyFactor * tail_rms_bound(tail_radius, coefficients.size() - 1);
    return TruncatedSeries(std::move(coefficients), std::nullopt, SeededStream{}, tail_radius, bound);
}

void TruncatedSeries::check_certified(Complex z) const
{
    // A few ulps of slack: image circles computed by Mobius maps land on the
    // certified radius only up to rounding.
    if (std::abs(z) > tail_radius_ * (1.0 + 4e-16)) {
        std::ostringstream msg;
        msg << "|z| = " << std::abs(z) << " exceeds the certified radius " << tail_radius_;
        throw OutOfCertifiedDisk(msg.str());
    }
}

Complex horner(std::span<Complex const> coefficients, Complex z)
{
    Complex acc{};
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

void horner_with_derivative(std::span<Complex const> coefficients, std::span<Complex const> points,
                            std::span<Complex> values, std::span<Complex> derivatives)
{
    std::size_t const m = points.size();
    if (values.size() != m || derivatives.size() != m) {
        throw LengthMismatch("output spans must match the number of points");
    }
    // Split real/imaginary storage so the inner loop over points vectorizes.
    std::vector<double> buf(6 * m, 0.0);
    double* zr = buf.data();
    double* zi = zr + m;
    double* pr = zi + m;
    double* pi = pr + m;
    double* dr = pi + m;
    double* di = dr + m;
    for (std::size_t j = 0; j < m; ++j) {
        zr[j] = points[j].real();
        zi[j] = points[j].imag();
    }
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        double const cr = it->real();
        double const ci = it->imag();
        for (std::size_t j = 0; j < m; ++j) {
            double const a = zr[j];
            double const b = zi[j];
            double const ndr = dr[j] * a - di[j] * b + pr[j];
            double const ndi = dr[j] * b + di[j] * a + pi[j];
            double const npr = pr[j] * a - pi[j] * b + cr;
            double const npi = pr[j] * b + pi[j] * a + ci;
            dr[j] = ndr;
            di[j] = ndi;
            pr[j] = npr;
            pi[j] = npi;
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        values[j] = {pr[j], pi[j]};
        derivatives[j] = {dr[j], di[j]};
    }
}

Complex evaluate(TruncatedSeries const& series, Complex z)
{
    series.check_certified(z);
    return horner(series.coefficients(), z);
}

Complex pushforward_evaluate(TruncatedSeries const& series, DiskPoint u, DiskPoint z)
{
    return evaluate(series, mobius(u, z).value()) / delta(u, z);
}

std::vector<Complex> alpha_coefficients(DiskPoint u, std::span<DiskPoint const> points,
                                        std::span<Complex const> lambdas, std::size_t degree)
{
    if (points.size() != lambdas.size()) {
        throw LengthMismatch("points and lambdas must have the same length");
    }
    if (points.empty()) {
        throw PreconditionError("alpha coefficients need at least one point");
    }
    std::vector<Complex> alpha(degree + 1, Complex{});
    for (std::size_t i = 0; i < points.size(); ++i) {
        Complex const phi = mobius(u, points[i]).value();
        Complex term = lambdas[i] / delta(u, points[i]);
        for (std::size_t k = 0; k <= degree; ++k) {
            alpha[k] += term;
            term *= phi;
        }
    }
    return alpha;
}

double alpha_power_sum(DiskPoint u, DiskPoint z, double p)
{
    double const abs_u2 = std::norm(u.value());
    double const abs_z2 = std::norm(z.value());
    if (p == 2.0) {
        return 1.0 / (1.0 - abs_z2);
    }
    if (p == 4.0) {
        double const a = std::norm(1.0 - std::conj(u.value()) * z.value());
        double const b = std::norm(z.value() - u.value());
        return (1.0 - abs_u2) / ((1.0 - abs_z2) * (a + b));
    }
    std::ostringstream msg;
    msg << "exponent " << p << " is not supported (expected 2 or 4)";
    throw UnsupportedExponent(msg.str());
}

double alpha_square_sum_closed_form(std::span<DiskPoint const> points, std::span<Complex const> lambdas)
{
    if (points.size() != lambdas.size()) {
        throw LengthMismatch("points and lambdas must have the same length");
    }
    Complex total{};
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            total += lambdas[i] * std::conj(lambdas[j]) * q_covariance(points[i], points[j]);
        }
    }
    return total.real();
}

}  // namespace hyperzero

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hyperzero/error.hpp"
#include "hyperzero/roots.hpp"
#include "oracles.hpp"

using namespace hyperzero;

namespace {

// Eigenvalues of the companion matrix of sum_k c_k z^k.
std::vector<Complex> companion_roots(std::vector<Complex> const& c)
{
    auto const n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    std::vector<Complex> out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
    return out;
}

// Largest distance from a point of `a` to its nearest point of `b`, matched one to one greedily.
double match_distance(std::vector<Complex> a, std::vector<Complex> b)
{
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (Complex z : a) {
        auto best = b.begin();
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (std::abs(*it - z) < std::abs(*best - z)) best = it;
        }
        worst = std::max(worst, std::abs(*best - z));
        b.erase(best);
    }
    return worst;
}

std::vector<Complex> from_roots(std::vector<Complex> const& roots)
{
    std::vector<Complex> c{1.0};
    for (Complex r : roots) {
        std::vector<Complex> next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = next;
    }
    return c;
}

}  // namespace

TEST_CASE("roots of z^n - a match their analytic values")
{
    for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 50u}) {
        for (Complex a : {Complex{0.5, 0.0}, Complex{0.0, -0.3}, Complex{-2.0, 1.0}}) {
            std::vector<Complex> c(n + 1);
            c[0] = -a;
            c[n] = 1.0;
            std::vector<Complex> exact;
            for (std::size_t k = 0; k < n; ++k) {
                exact.push_back(std::polar(std::pow(std::abs(a), 1.0 / n),
                                           (std::arg(a) + 2.0 * std::numbers::pi * k) / static_cast<double>(n)));
            }
            INFO("n=" << n << " a=" << a);
            CHECK(match_distance(polynomial_roots(c), exact) < 1e-10);
        }
    }
}

TEST_CASE("roots agree with the companion-matrix eigenvalues")
{
    oracle::Gen gen(31);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Complex> c(static_cast<std::size_t>(gen.integer(3, 60)));
        for (auto& x : c) x = gen.normal();
        auto const ours = polynomial_roots(c);
        auto const ref = companion_roots(c);
        CHECK(ours.size() == c.size() - 1);
        CHECK(match_distance(ours, ref) < 1e-7);
    }
}

TEST_CASE("roots of a polynomial built from known roots")
{
    oracle::Gen gen(32);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Complex> roots(static_cast<std::size_t>(gen.integer(1, 12)));
        for (auto& r : roots) r = gen.disk(1.5);
        CHECK(match_distance(polynomial_roots(from_roots(roots)), roots) < 1e-8);
    }
}

TEST_CASE("leading zeros, trimming and degenerate input")
{
    auto const r = polynomial_roots(std::vector<Complex>{0.0, 0.0, 1.0, 1.0});
    CHECK(match_distance(r, {0.0, 0.0, -1.0}) < 1e-14);
    // A negligible top coefficient is dropped.
    auto const t = polynomial_roots(std::vector<Complex>{-0.5, 1.0, 1e-300});
    REQUIRE(t.size() == 1);
    CHECK(std::abs(t[0] - 0.5) < 1e-15);
    CHECK_THROWS_AS(polynomial_roots(std::vector<Complex>{0.0, 0.0}), DegenerateInput);
    CHECK_THROWS_AS(polynomial_roots(std::vector<Complex>{}), DegenerateInput);
    CHECK(polynomial_roots(std::vector<Complex>{3.0}).empty());
}

TEST_CASE("find_roots reports certified zeros inside the search disk")
{
    for (std::uint64_t s = 0; s < 40; ++s) {
        std::size_t const degree = 20 + 5 * s;
        auto const series = TruncatedSeries::from_coefficients(
            sample_coefficients(CoefficientLaw::gaussian(), degree + 1, SeededStream{3, s}), 0.8);
        ZeroSet const zs = find_roots(series, 0.8);
        double const scale = coefficient_scale(series.coefficients(), 0.8);
        for (Zero const& z : zs.zeros) {
            CHECK(z.location.abs() <= 0.8);
            CHECK(z.residual <= 1e-8 * scale);
        }
        // Every companion eigenvalue well inside the disk is reported.
        std::vector<Complex> const coeffs(series.coefficients().begin(), series.coefficients().end());
        std::size_t inside = 0;
        for (Complex r : companion_roots(coeffs)) inside += std::abs(r) < 0.8 - 1e-6;
        std::size_t reported = 0;
        for (Zero const& z : zs.zeros) reported += z.location.abs() < 0.8 - 1e-6;
        CHECK(reported == inside);
    }
    auto const series = TruncatedSeries::from_coefficients({1.0, 1.0}, 0.5);
    CHECK_THROWS_AS(find_roots(series, 0.6), OutOfCertifiedDisk);
}

TEST_CASE("a double zero is counted twice")
{
    auto const series = TruncatedSeries::from_coefficients(from_roots({0.2, 0.2, -0.5}), 0.9);
    ZeroSet const zs = find_roots(series, 0.9);
    CHECK(zs.count() == 3);
    CHECK(zs.count_in_ball(0.2, 0.01) == 2);
}

TEST_CASE("argument principle counts match global roots")
{
    oracle::Gen gen(33);
    int compared = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto const series = TruncatedSeries::from_coefficients(
            sample_coefficients(CoefficientLaw::gaussian(), 80, SeededStream{4, s}), 0.9);
        ZeroSet const zs = find_roots(series, 0.9);
        for (int b = 0; b < 5; ++b) {
            Complex const c = gen.disk(0.4);
            double const r = gen.uniform(0.05, 0.85 - std::abs(c));
            try {
                int const n = count_zeros_in_disk(series, DiskPoint(c), r);
                CHECK(static_cast<std::size_t>(n) == zs.count_in_ball(c, r));
                ++compared;
            } catch (ContourTooClose const&) {
            }
        }
    }
    CHECK(compared > 140);
}

TEST_CASE("argument principle through a Mobius map counts pulled-back zeros")
{
    std::vector<Complex> const roots{{0.1, 0.2}, {-0.6, 0.1}, {0.85, 0.0}, {0.3, -0.4}};
    auto const series = TruncatedSeries::from_coefficients(from_roots(roots), 0.95);
    DiskPoint const u{0.6, 0.0};
    DiskPoint const center{0.0, 0.0};
    double const radius = 0.5;
    std::size_t expected = 0;
    for (Complex w : roots) expected += std::abs(oracle::mobius(-u.value(), w) - center.value()) < radius;
    EuclideanDisk const img = mobius_image_disk(u, center.value(), radius);
    REQUIRE(img.max_modulus() <= 0.95);
    CHECK(count_zeros_in_disk(series, center, radius, u) == static_cast<int>(expected));
}

TEST_CASE("a zero on the contour is reported")
{
    auto const series = TruncatedSeries::from_coefficients({-0.3, 1.0}, 0.9);
    CHECK_THROWS_AS(count_zeros_in_disk(series, DiskPoint{}, 0.3), ContourTooClose);
    CHECK(count_zeros_in_disk(series, DiskPoint{}, 0.31) == 1);
    CHECK(count_zeros_in_disk(series, DiskPoint{}, 0.29) == 0);
    CHECK_THROWS_AS(count_zeros_in_disk(series, DiskPoint{0.5, 0.0}, 0.6), PreconditionError);
}

TEST_CASE("root configuration validation")
{
    RootConfig bad;
    bad.max_iterations = 0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    CHECK_NOTHROW(RootConfig{}.validate());
}

TEST_CASE("worked root values")
{
    auto const quad = find_roots(TruncatedSeries::from_coefficients({-0.25, 0.0, 1.0}, 0.9), 0.9);
    REQUIRE(quad.zeros.size() == 2);
    CHECK(std::abs(quad.zeros[0].location.value() - Complex{-0.5, 0.0}) < 1e-15);
    CHECK(std::abs(quad.zeros[1].location.value() - Complex{0.5, 0.0}) < 1e-15);

    auto const identity = TruncatedSeries::from_coefficients({0.0, 1.0}, 0.9);
    auto const zs = find_roots(identity, 0.9);
    REQUIRE(zs.zeros.size() == 1);
    CHECK(zs.zeros[0].location.value() == Complex{});
    CHECK(zs.zeros[0].multiplicity == 1);
    CHECK(count_zeros_in_disk(identity, DiskPoint{}, 0.5) == 1);
    CHECK(count_zeros_in_disk(identity, DiskPoint{0.7, 0.0}, 0.1) == 0);
}

TEST_CASE("global and contour counts agree on random truncations")
{
    int compared = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        // Degree 60 on |z| <= 0.6 for the first 50 seeds, then centered balls of radius 0.5.
        bool const first = s < 50;
        double const r = first ? 0.6 : 0.5;
        std::size_t const degree = first ? 60 : required_degree({0.5 * 1.01, 1e-10, 10.0});
        auto const series = TruncatedSeries::from_coefficients(
            sample_coefficients(CoefficientLaw::gaussian(), degree + 1, SeededStream{10, s}), first ? 0.6 : 0.505);
        ZeroSet const zs = find_roots(series, r);
        try {
            CHECK(static_cast<std::size_t>(count_zeros_in_disk(series, DiskPoint{}, r)) == zs.count_in_ball(0.0, r));
            ++compared;
        } catch (ContourTooClose const&) {
        }
    }
    CHECK(compared >= 98);
}

#include <doctest.h>

#include "hyperzero/error.hpp"
#include "hyperzero/parallel.hpp"
#include "hyperzero/pointproc.hpp"

using namespace hyperzero;

namespace {

// f(z) = z - w with w uniform on |w| < 0.5, drawn from the trial's stream.
CoefficientSource moving_root_source()
{
    return [](SeededStream const& stream, std::size_t first, std::span<Complex> out) {
        double const r = 0.5 * std::sqrt(to_unit_open(stream.word(0)));
        Complex const w = std::polar(r, 2.0 * std::numbers::pi * to_unit_open(stream.word(1)));
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::size_t const k = first + i;
            out[i] = k == 0 ? -w : (k == 1 ? Complex{1.0, 0.0} : Complex{});
        }
    };
}

CoefficientSource fixed_source(std::vector<Complex> coeffs)
{
    return [coeffs](SeededStream const&, std::size_t first, std::span<Complex> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = first + i < coeffs.size() ? coeffs[first + i] : 0.0;
    };
}

RunOptions options(unsigned threads = 1)
{
    RunOptions o;
    o.threads = threads;
    o.experiment = "unit";
    return o;
}

}  // namespace

TEST_CASE("ball families validate their geometry")
{
    CHECK_NOTHROW(BallFamily({DiskPoint{-0.4, 0.0}, DiskPoint{0.4, 0.0}}, 0.1));
    CHECK_THROWS_AS(BallFamily({}, 0.1), InvalidBallFamily);
    CHECK_THROWS_AS(BallFamily({DiskPoint{}}, 0.0), InvalidBallFamily);
    CHECK_THROWS_AS(BallFamily({DiskPoint{0.95, 0.0}}, 0.1), InvalidBallFamily);
    CHECK_THROWS_AS(BallFamily({DiskPoint{}, DiskPoint{0.15, 0.0}}, 0.1), InvalidBallFamily);
    CHECK_NOTHROW(BallFamily({DiskPoint{}, DiskPoint{0.15, 0.0}}, 0.05));
}

TEST_CASE("a deterministic polynomial gives probability 0 or 1 exactly")
{
    auto const src = fixed_source({Complex{-0.1, 0.0}, 1.0});
    auto const in = joint_hit_probability(src, "stub", DiskPoint{}, BallFamily({DiskPoint{}}, 0.2), 200, 1, options());
    CHECK(in.value == 1.0);
    CHECK(in.std_error == 0.0);
    CHECK(in.hits == 200);
    auto const out =
        joint_hit_probability(src, "stub", DiskPoint{}, BallFamily({DiskPoint{0.5, 0.0}}, 0.2), 200, 1, options());
    CHECK(out.value == 0.0);
    // Through a Mobius map the zero 0.1 is seen at mobius_inverse(u, 0.1).
    DiskPoint const u{0.5, 0.0};
    DiskPoint const pulled = mobius_inverse(u, DiskPoint{0.1, 0.0});
    auto const moved = joint_hit_probability(src, "stub", u, BallFamily({pulled}, 0.05), 50, 1, options());
    CHECK(moved.value == 1.0);
}

TEST_CASE("hit probability is unbiased on a stub series")
{
    // P(|w - c| < eps) = eps^2 / 0.25 for a ball inside |w| < 0.5.
    double const eps = 0.1;
    double const p = eps * eps / 0.25;
    BallFamily const ball({DiskPoint{0.2, 0.1}}, eps);
    std::size_t const trials = 2000;
    double chi2 = 0.0;
    double pooled = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto const est = joint_hit_probability(moving_root_source(), "stub", DiskPoint{}, ball, trials, seed,
                                               options());
        double const z = (est.value - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        chi2 += z * z;
        pooled += est.value;
        CHECK(est.params.seed == seed);
        CHECK(est.params.law == "stub");
    }
    pooled /= 50.0;
    // chi-square with 50 degrees of freedom: 0.1% and 99.9% quantiles.
    CHECK(chi2 > 24.7);
    CHECK(chi2 < 86.7);
    CHECK(std::abs(pooled - p) < 4.0 * std::sqrt(p * (1.0 - p) / (50.0 * trials)));
}

TEST_CASE("estimates do not depend on the thread count")
{
    BallFamily const balls({DiskPoint{0.0, 0.0}}, 0.2);
    auto const law = CoefficientLaw::rademacher();
    auto const a = joint_hit_probability(law, DiskPoint{0.6, 0.0}, balls, 300, 5, options(1));
    auto const b = joint_hit_probability(law, DiskPoint{0.6, 0.0}, balls, 300, 5, options(4));
    CHECK(a.hits == b.hits);
    CHECK(a.value == b.value);
    auto const c = joint_hit_probability(law, DiskPoint{0.6, 0.0}, balls, 300, 6, options(1));
    CHECK(c.params.truncation_degree == a.params.truncation_degree);
}

TEST_CASE("for_each_trial rethrows the lowest failing index")
{
    std::vector<int> out(1000, 0);
    CHECK_NOTHROW(for_each_trial(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i); }));
    CHECK(out[999] == 999);
    try {
        for_each_trial(1000, 1, [](std::size_t i) {
            if (i == 17 || i == 500) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (std::runtime_error const& e) {
        CHECK(std::string(e.what()) == "17");
    }
}

TEST_CASE("trial failures carry provenance")
{
    // Zero polynomial: the winding integrand vanishes on the contour.
    auto const src = fixed_source({});
    try {
        (void)joint_hit_probability(src, "zero", DiskPoint{}, BallFamily({DiskPoint{}}, 0.1), 10, 77, options());
        FAIL("expected TrialFailure");
    } catch (TrialFailure const& e) {
        CHECK(e.trial() == 0);
        CHECK(e.master_seed() == 77);
        CHECK(e.stream_index() == trial_stream_index(stable_hash("unit"), 0, 0));
    }
}

TEST_CASE("correlation grid and extrapolation")
{
    std::vector<DiskPoint> const us{DiskPoint{0.0, 0.0}};
    std::vector<double> const eps{0.3, 0.2};
    std::vector<DiskPoint> const centers{DiskPoint{}};
    auto const law = CoefficientLaw::gaussian();
    auto const grid = correlation_grid(law, us, eps, centers, 400, 3, options());
    REQUIRE(grid.size() == 2);
    auto const again = correlation_grid(law, us, eps, centers, 400, 3, options(3));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i].estimate.hits == again[i].estimate.hits);
    for (auto const& cell : grid) {
        CHECK(cell.scaled_value == doctest::Approx(cell.estimate.value / (cell.epsilon * cell.epsilon)));
    }
    std::vector<double> const increasing{0.1, 0.2};
    CHECK_THROWS_AS(correlation_grid(law, us, increasing, centers, 10, 3, options()), PreconditionError);
    std::vector<double> const overlapping{0.3};
    std::vector<DiskPoint> const close{DiskPoint{}, DiskPoint{0.3, 0.0}};
    CHECK_THROWS_AS(correlation_grid(law, us, overlapping, close, 10, 3, options()), InvalidBallFamily);
}

TEST_CASE("extrapolation of synthetic cells")
{
    // scaled = 2 + 3 eps^2 exactly, with equal errors.
    std::vector<CorrelationCell> cells;
    for (double e : {0.2, 0.1, 0.05}) {
        CorrelationCell c;
        c.epsilon = e;
        c.scaled_value = 2.0 + 3.0 * e * e;
        c.scaled_std_error = 0.01;
        c.estimate.hits = 100;
        cells.push_back(c);
    }
    auto const rep = extrapolate_correlation_limit(cells, 1, 3);
    CHECK(rep.extrapolated);
    CHECK(rep.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.extrapolation_error < 1e-12);
    CHECK(rep.statistical_error > 0.0);
    CHECK(rep.combined_error() >= rep.statistical_error);

    auto single = extrapolate_correlation_limit({cells[0]}, 1, 1);
    CHECK_FALSE(single.extrapolated);
    CHECK(single.value == cells[0].scaled_value);

    cells[1].estimate.hits = kMinHitsPerCell - 1;
    CHECK_THROWS_AS(extrapolate_correlation_limit(cells, 1, 3), InsufficientHits);
    CHECK_THROWS_AS(extrapolate_correlation_limit(cells, 1, 2), PreconditionError);
}

TEST_CASE("Gaussian intensity with global roots and with counting")
{
    CHECK(gaussian_expected_count(0.5) == doctest::Approx(1.0 / 3.0));
    auto const law = CoefficientLaw::gaussian();
    auto const global = intensity_profile(law, DiskPoint{}, 0.5, 4, 3000, 11, options());
    CHECK(global.method == RootMethod::GlobalRoots);
    CHECK(std::abs(global.total_mean_count - 1.0 / 3.0) < 4.0 * global.total_std_error);
    double sum = 0.0;
    for (auto const& b : global.radial_bins) sum += b.mean_count;
    CHECK(sum == doctest::Approx(global.total_mean_count));

    // At u = 0.9 the image disk needs a degree beyond the global solver.
    auto const counted = intensity_profile(law, DiskPoint{0.9, 0.0}, 0.5, 2, 600, 12, options());
    CHECK(counted.method == RootMethod::ArgumentPrinciple);
    CHECK(counted.truncation_degree > kGlobalRootsMaxDegree);
    CHECK(std::abs(counted.total_mean_count - 1.0 / 3.0) < 4.0 * counted.total_std_error);
}

TEST_CASE("KS distance")
{
    CHECK(normal_cdf(0.0, 2.0) == 0.5);
    CHECK(normal_cdf(1.0, 1.0) == doctest::Approx(0.8413447460685429));
    std::vector<double> q;
    std::size_t const n = 1000;
    // Exact quantiles by bisection on normal_cdf.
    for (std::size_t i = 0; i < n; ++i) {
        double const target = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double lo = -10.0, hi = 10.0;
        for (int it = 0; it < 200; ++it) {
            double const mid = 0.5 * (lo + hi);
            (normal_cdf(mid, 1.0) < target ? lo : hi) = mid;
        }
        q.push_back(0.5 * (lo + hi));
    }
    CHECK(ks_distance_normal(q, 1.0) == doctest::Approx(0.5 / n).epsilon(1e-6));
    CHECK(ks_distance_normal(q, 2.0) > 0.1);
    CHECK_THROWS_AS(ks_distance_normal(std::vector<double>{}, 1.0), PreconditionError);
}

TEST_CASE("linear statistic of the Gaussian series is exactly normal")
{
    std::vector<DiskPoint> const pts{DiskPoint{0.3, 0.0}, DiskPoint{-0.2, 0.4}};
    std::vector<Complex> const lambdas{{1.0, 0.0}, {0.0, 1.0}};
    auto const s = clt_statistic_sample(CoefficientLaw::gaussian(), DiskPoint{0.7, 0.1}, pts, lambdas, 20000, 4,
                                        options(2));
    REQUIRE(s.ks_distance);
    CHECK(*s.ks_distance < 1.63 / std::sqrt(20000.0));
    CHECK(std::abs(s.empirical_variance - s.sigma2) < 4.0 * s.sigma2 * std::sqrt(2.0 / 20000.0));

    std::vector<Complex> const zero{0.0, 0.0};
    auto const degenerate = clt_statistic_sample(CoefficientLaw::gaussian(), DiskPoint{}, pts, zero, 1000, 4);
    CHECK_FALSE(degenerate.ks_distance);
    CHECK(degenerate.sigma2 == 0.0);
    CHECK_THROWS_AS(clt_statistic_sample(CoefficientLaw::gaussian(), DiskPoint{}, pts, zero, 999, 4),
                    PreconditionError);
    CHECK_THROWS_AS(clt_statistic_sample(CoefficientLaw::gaussian(), DiskPoint{}, pts,
                                         std::vector<Complex>{1.0}, 1000, 4),
                    LengthMismatch);
}

TEST_CASE("independence at equal parameters is perfect correlation")
{
    auto const law = CoefficientLaw::rademacher();
    DiskPoint const u{0.6, 0.0};
    auto const r = independence_experiment(law, u, u, DiskPoint{}, 0.3, 500, 8, options());
    REQUIRE_FALSE(std::isnan(r.indicator_correlation));
    CHECK(r.indicator_correlation == 1.0);
    CHECK(r.p1 == r.p2);
    CHECK(r.pseudo_hyperbolic_distance == 0.0);
    CHECK(r.predicted_field_covariance == q_covariance(DiskPoint{}, DiskPoint{}));
    CHECK(std::abs(r.field_covariance.imag()) < 1e-12);
    CHECK(std::abs(r.field_covariance.real() - 1.0) < 4.0 * r.field_covariance_se_re);
}

TEST_CASE("binomial errors match the spread over seeds")
{
    double const eps = 0.1;
    double const p = eps * eps / 0.25;
    BallFamily const ball({DiskPoint{-0.1, 0.2}}, eps);
    double chi2 = 0.0;
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        auto const est = joint_hit_probability(moving_root_source(), "stub", DiskPoint{}, ball, 2000, seed, options());
        REQUIRE(est.std_error > 0.0);
        double const z = (est.value - p) / est.std_error;
        chi2 += z * z;
    }
    CHECK(chi2 > 0.5 * 50.0);
    CHECK(chi2 < 1.5 * 50.0);
}

TEST_CASE("origin calibration and a single ball off center")
{
    auto const law = CoefficientLaw::gaussian();
    double const eps = 0.1;
    auto const at0 = joint_hit_probability(law, DiskPoint{}, BallFamily({DiskPoint{}}, eps), 10000, 21, options());
    double const calib = eps * eps / (1.0 - eps * eps);
    CHECK(std::abs(at0.value - calib) < 4.0 * at0.std_error);

    // Extrapolated ratio between centers 0.5 and 0 tends to 1 / (1 - 0.25)^2.
    std::vector<DiskPoint> const us{DiskPoint{}};
    std::vector<double> const epsilons{0.2, 0.1};
    std::vector<DiskPoint> const c0{DiskPoint{}};
    std::vector<DiskPoint> const c1{DiskPoint{0.5, 0.0}};
    auto const r0 = correlation_limit(law, us, epsilons, c0, 20000, 22, options());
    auto const r1 = correlation_limit(law, us, epsilons, c1, 20000, 23, options());
    double const ratio = r1.value / r0.value;
    double const err = ratio * std::hypot(r1.combined_error() / r1.value, r0.combined_error() / r0.value);
    INFO("ratio " << ratio << " +- " << err);
    CHECK(std::abs(ratio - 16.0 / 9.0) < 4.0 * err);
}

TEST_CASE("two antipodal balls follow the determinantal correction")
{
    auto const law = CoefficientLaw::gaussian();
    double const eps = 0.1;
    DiskPoint const a{-0.4, 0.0}, b{0.4, 0.0};
    std::size_t const trials = 300000;
    RunOptions o = options();
    auto const joint = joint_hit_probability(law, DiskPoint{}, BallFamily({a, b}, eps), trials, 31, o);
    o.cell = 1;
    auto const pa = joint_hit_probability(law, DiskPoint{}, BallFamily({a}, eps), trials, 31, o);
    o.cell = 2;
    auto const pb = joint_hit_probability(law, DiskPoint{}, BallFamily({b}, eps), trials, 31, o);
    std::vector<DiskPoint> const pts{a, b};
    double const factor = kernel_determinant(pts, 1.0) / (bergman_kernel(a, a, 1.0).real() * bergman_kernel(b, b, 1.0).real());
    CHECK(factor < 1.0);
    double const predicted = pa.value * pb.value * factor;
    double const predicted_se = factor * std::hypot(pa.value * pb.std_error, pb.value * pa.std_error);
    INFO("joint " << joint.value << " +- " << joint.std_error << " predicted " << predicted);
    CHECK(std::abs(joint.value - predicted) < 4.0 * std::hypot(joint.std_error, predicted_se));
}

TEST_CASE("Rademacher intensity near the boundary matches the Gaussian profile")
{
    DiskPoint const u{0.99, 0.0};
    auto const g = intensity_profile(CoefficientLaw::gaussian(), u, 0.3, 2, 1000, 41, options());
    auto const r = intensity_profile(CoefficientLaw::rademacher(), u, 0.3, 2, 1000, 42, options());
    for (std::size_t i = 0; i < 2; ++i) {
        auto const& x = g.radial_bins[i];
        auto const& y = r.radial_bins[i];
        CHECK(std::abs(x.expected_count_per_area - y.expected_count_per_area) <
              4.0 * std::hypot(x.std_error, y.std_error));
    }
    CHECK_THROWS_AS(intensity_profile(CoefficientLaw::gaussian(), DiskPoint{}, 0.3, 2, 0, 1, options()),
                    PreconditionError);
}

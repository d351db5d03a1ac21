#include "hyperzero/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "hyperzero/error.hpp"
#include "hyperzero/parallel.hpp"

namespace hyperzero {

unsigned default_thread_count()
{
    if (char const* env = std::getenv("HYPERZERO_THREADS")) {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

RunOptions RunOptions::defaults()
{
    RunOptions o;
    o.threads = default_thread_count();
    return o;
}

CoefficientSource law_source(CoefficientLaw const& law)
{
    return [law](SeededStream const& stream, std::size_t first, std::span<Complex> out) {
        sample_coefficients_into(law, stream, first, out);
    };
}

BallFamily::BallFamily(std::vector<DiskPoint> centers, double epsilon)
    : centers_(std::move(centers)), epsilon_(epsilon)
{
    if (centers_.empty()) {
        throw InvalidBallFamily("ball family needs at least one center");
    }
    if (!(epsilon_ > 0.0)) {
        throw InvalidBallFamily("ball radius must be positive");
    }
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        if (!(centers_[i].abs() + epsilon_ < 1.0)) {
            std::ostringstream msg;
            msg << "ball " << i << " around " << centers_[i].value() << " leaves the unit disk";
            throw InvalidBallFamily(msg.str());
        }
        for (std::size_t j = i + 1; j < centers_.size(); ++j) {
            if (!(std::abs(centers_[i].value() - centers_[j].value()) > 2.0 * epsilon_)) {
                std::ostringstream msg;
                msg << "balls " << i << " and " << j << " overlap";
                throw InvalidBallFamily(msg.str());
            }
        }
    }
}

namespace {

// Truncation needed to count zeros in one pushed-forward ball, sized for the
// largest jittered radius.
struct BallPlan {
    DiskPoint center;
    double radius = 0.0;
    double certified_radius = 0.0;
    std::size_t degree = 0;
};

BallPlan plan_ball(DiskPoint u, DiskPoint center, double radius, RunOptions const& options)
{
    double const widest = std::min(radius * (1.0 + kContourJitter), 0.5 * (radius + 1.0 - center.abs()));
    double const r = mobius_image_disk(u, center.value(), widest).max_modulus();
    return {center, radius, r, required_degree(options.policy(r))};
}

// Grows the trial's coefficient prefix to at least `count` entries.
void ensure_coefficients(CoefficientSource const& source, SeededStream const& stream,
                         std::vector<Complex>& coefficients, std::size_t count)
{
    std::size_t const have = coefficients.size();
    if (have >= count) return;
    coefficients.resize(count);
    source(stream, have, std::span<Complex>(coefficients).subspan(have));
}

TruncatedSeries prefix_series(std::vector<Complex> const& coefficients, BallPlan const& plan)
{
    return TruncatedSeries::from_coefficients(
        std::vector<Complex>(coefficients.begin(), coefficients.begin() + plan.degree + 1),
        plan.certified_radius);
}

// Counts zeros in a ball, retrying with a deterministic radius jitter when a
// zero sits on the contour.
int count_with_jitter(TruncatedSeries const& series, BallPlan const& plan, DiskPoint u,
                      SeededStream const& stream, std::uint64_t ball_index, RootConfig const& config)
{
    double radius = plan.radius;
    for (int attempt = 0;; ++attempt) {
        try {
            return count_zeros_in_disk(series, plan.center, radius, u, config);
        } catch (ContourTooClose const&) {
            if (attempt >= kMaxJitterAttempts) throw;
        } catch (QuadratureUnresolved const&) {
            if (attempt >= kMaxJitterAttempts) throw;
        }
        double const v = to_unit_open(splitmix64(stream.key() ^ (ball_index * 0x9E37ULL + attempt + 1)));
        radius = plan.radius * (1.0 + kContourJitter * (2.0 * v - 1.0));
    }
}

SeededStream trial_stream(std::uint64_t seed, RunOptions const& options, std::uint64_t cell, std::size_t trial)
{
    return {seed, trial_stream_index(stable_hash(options.experiment), cell, trial)};
}

template <class Body>
void run_trials(std::size_t trials, std::uint64_t seed, std::uint64_t cell, RunOptions const& options, Body&& body)
{
    for_each_trial(trials, options.threads, [&](std::size_t t) {
        SeededStream const stream = trial_stream(seed, options, cell, t);
        try {
            body(t, stream);
        } catch (Error const& e) {
            std::ostringstream msg;
            msg << "trial " << t << " (stream " << stream.stream_index << ", seed " << seed
                << ") failed: " << e.what();
            throw TrialFailure(msg.str(), t, stream.stream_index, seed);
        }
    });
}

// Sample mean and standard error of the mean.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <class F>
MeanSe mean_se(std::size_t n, F value)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += value(i);
    double const mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double const d = value(i) - mean;
        ss += d * d;
    }
    double const var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

void require_trials(std::size_t trials)
{
    if (trials == 0) throw PreconditionError("at least one trial is required");
}

}  // namespace

CorrelationEstimate joint_hit_probability(CoefficientSource const& source, std::string const& source_name,
                                          DiskPoint u, BallFamily const& balls, std::size_t trials,
                                          std::uint64_t seed, RunOptions const& options)
{
    require_trials(trials);
    std::vector<BallPlan> plans;
    for (DiskPoint const& c : balls.centers()) plans.push_back(plan_ball(u, c, balls.epsilon(), options));
    std::vector<std::size_t> order(plans.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Cheapest ball first: most trials end at the first miss.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return plans[a].degree < plans[b].degree; });

    std::vector<unsigned char> hit(trials, 0);
    run_trials(trials, seed, options.cell, options, [&](std::size_t t, SeededStream const& stream) {
        std::vector<Complex> coefficients;
        bool all = true;
        for (std::size_t idx : order) {
            BallPlan const& plan = plans[idx];
            ensure_coefficients(source, stream, coefficients, plan.degree + 1);
            if (count_with_jitter(prefix_series(coefficients, plan), plan, u, stream, idx, options.roots) == 0) {
                all = false;
                break;
            }
        }
        hit[t] = all ? 1 : 0;
    });

    CorrelationEstimate est;
    est.trials = trials;
    for (unsigned char h : hit) est.hits += h;
    est.value = static_cast<double>(est.hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(trials));
    est.params.law = source_name;
    est.params.u = u;
    est.params.epsilon = balls.epsilon();
    est.params.centers = balls.centers();
    est.params.seed = seed;
    for (BallPlan const& p : plans) est.params.truncation_degree = std::max(est.params.truncation_degree, p.degree);
    return est;
}

CorrelationEstimate joint_hit_probability(CoefficientLaw const& law, DiskPoint u, BallFamily const& balls,
                                          std::size_t trials, std::uint64_t seed, RunOptions const& options)
{
    return joint_hit_probability(law_source(law), law.name(), u, balls, trials, seed, options);
}

double CorrelationLimitReport::combined_error() const
{
    return std::hypot(statistical_error, extrapolation_error);
}

namespace {

struct LineFit {
    double intercept = 0.0;
    double intercept_se = 0.0;
};

// Weighted least squares y = a + b x with weights 1 / se^2.
LineFit weighted_line(std::span<double const> x, std::span<double const> y, std::span<double const> se)
{
    double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const w = 1.0 / std::max(se[i] * se[i], 1e-300);
        s += w;
        sx += w * x[i];
        sxx += w * x[i] * x[i];
        sy += w * y[i];
        sxy += w * x[i] * y[i];
    }
    double const det = s * sxx - sx * sx;
    LineFit fit;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    fit.intercept_se = std::sqrt(sxx / det);
    return fit;
}

}  // namespace

std::vector<CorrelationCell> correlation_grid(CoefficientLaw const& law, std::span<DiskPoint const> u_sequence,
                                              std::span<double const> epsilons,
                                              std::span<DiskPoint const> centers, std::size_t trials,
                                              std::uint64_t seed, RunOptions const& options)
{
    if (u_sequence.empty() || epsilons.empty()) {
        throw PreconditionError("correlation grid needs at least one u and one epsilon");
    }
    for (std::size_t i = 1; i < epsilons.size(); ++i) {
        if (!(epsilons[i] < epsilons[i - 1])) throw PreconditionError("epsilons must be strictly decreasing");
    }
    for (std::size_t i = 1; i < u_sequence.size(); ++i) {
        if (!(u_sequence[i].abs() > u_sequence[i - 1].abs())) {
            throw PreconditionError("|u| must be strictly increasing along the sequence");
        }
    }
    std::vector<DiskPoint> const center_list(centers.begin(), centers.end());
    std::vector<BallFamily> families;
    for (double eps : epsilons) families.emplace_back(center_list, eps);  // validate before sampling

    double const n2 = 2.0 * static_cast<double>(centers.size());
    std::vector<CorrelationCell> cells;
    for (std::size_t iu = 0; iu < u_sequence.size(); ++iu) {
        for (std::size_t ie = 0; ie < epsilons.size(); ++ie) {
            RunOptions cell_options = options;
            cell_options.cell = options.cell + iu * epsilons.size() + ie;
            CorrelationCell cell;
            cell.u = u_sequence[iu];
            cell.epsilon = epsilons[ie];
            cell.estimate = joint_hit_probability(law, u_sequence[iu], families[ie], trials, seed, cell_options);
            double const scale = std::pow(epsilons[ie], -n2);
            cell.scaled_value = scale * cell.estimate.value;
            cell.scaled_std_error = scale * cell.estimate.std_error;
            cells.push_back(cell);
        }
    }
    return cells;
}

CorrelationLimitReport extrapolate_correlation_limit(std::vector<CorrelationCell> cells, std::size_t points,
                                                     std::size_t epsilon_count)
{
    if (epsilon_count == 0 || cells.empty() || cells.size() % epsilon_count != 0) {
        throw PreconditionError("cells do not form a (u, eps) grid");
    }
    for (CorrelationCell const& cell : cells) {
        if (cell.estimate.hits < kMinHitsPerCell) {
            std::ostringstream msg;
            msg << "cell (|u| = " << cell.u.abs() << ", eps = " << cell.epsilon << ") has only "
                << cell.estimate.hits << " hits (need " << kMinHitsPerCell << ")";
            throw InsufficientHits(msg.str());
        }
    }
    CorrelationLimitReport report;
    report.points = points;
    report.cells = std::move(cells);

    // Extrapolate at the largest |u|: the last row of the grid.
    std::size_t const first = report.cells.size() - epsilon_count;
    std::vector<double> x, y, se;
    for (std::size_t ie = 0; ie < epsilon_count; ++ie) {
        CorrelationCell const& cell = report.cells[first + ie];
        x.push_back(cell.epsilon * cell.epsilon);
        y.push_back(cell.scaled_value);
        se.push_back(cell.scaled_std_error);
    }
    if (x.size() == 1) {
        report.value = y[0];
        report.statistical_error = se[0];
        return report;
    }
    LineFit const fit = weighted_line(x, y, se);
    report.extrapolated = true;
    report.value = fit.intercept;
    report.statistical_error = fit.intercept_se;
    if (x.size() >= 3) {
        // Sensitivity to curvature: refit without the largest epsilon (first entry).
        LineFit const inner = weighted_line(std::span(x).subspan(1), std::span(y).subspan(1),
                                            std::span(se).subspan(1));
        report.extrapolation_error = std::abs(inner.intercept - fit.intercept);
    }
    return report;
}

CorrelationLimitReport correlation_limit(CoefficientLaw const& law, std::span<DiskPoint const> u_sequence,
                                         std::span<double const> epsilons,
                                         std::span<DiskPoint const> centers, std::size_t trials,
                                         std::uint64_t seed, RunOptions const& options)
{
    return extrapolate_correlation_limit(
        correlation_grid(law, u_sequence, epsilons, centers, trials, seed, options), centers.size(),
        epsilons.size());
}

double gaussian_expected_count(double radius)
{
    return radius * radius / (1.0 - radius * radius);
}

IntensityProfile intensity_profile(CoefficientLaw const& law, DiskPoint u, double search_radius,
                                   std::size_t bins, std::size_t trials, std::uint64_t seed,
                                   RunOptions const& options)
{
    require_trials(trials);
    if (bins == 0) throw PreconditionError("at least one radial bin is required");
    if (!(search_radius > 0.0 && search_radius < 1.0)) {
        throw PreconditionError("search radius must lie in (0, 1)");
    }

    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        edges[b] = search_radius * static_cast<double>(b) / static_cast<double>(bins);
    }

    IntensityProfile profile;
    profile.trials = trials;
    double const image_radius = mobius_image_disk(u, Complex{}, search_radius).max_modulus();
    std::size_t const global_degree = required_degree(options.policy(image_radius));
    profile.method = global_degree <= kGlobalRootsMaxDegree ? RootMethod::GlobalRoots
                                                            : RootMethod::ArgumentPrinciple;

    std::vector<int> counts(trials * bins, 0);
    if (profile.method == RootMethod::GlobalRoots) {
        profile.truncation_degree = global_degree;
        run_trials(trials, seed, options.cell, options, [&](std::size_t t, SeededStream const& stream) {
            TruncatedSeries const series = TruncatedSeries::sample(law, stream, options.policy(image_radius));
            ZeroSet const zs = find_roots(series, image_radius, options.roots);
            for (Zero const& z : zs.zeros) {
                double const r = mobius_inverse(u, z.location).abs();
                if (r >= search_radius) continue;
                auto const b = std::min(bins - 1, static_cast<std::size_t>(r / search_radius * static_cast<double>(bins)));
                counts[t * bins + b] += z.multiplicity;
            }
        });
    } else {
        std::vector<BallPlan> plans;
        for (std::size_t b = 1; b <= bins; ++b) plans.push_back(plan_ball(u, DiskPoint{}, edges[b], options));
        profile.truncation_degree = plans.back().degree;
        run_trials(trials, seed, options.cell, options, [&](std::size_t t, SeededStream const& stream) {
            std::vector<Complex> coefficients;
            int previous = 0;
            for (std::size_t b = 0; b < bins; ++b) {
                ensure_coefficients(law_source(law), stream, coefficients, plans[b].degree + 1);
                int const inside = count_with_jitter(prefix_series(coefficients, plans[b]), plans[b], u, stream,
                                                     b, options.roots);
                counts[t * bins + b] = inside - previous;
                previous = inside;
            }
        });
    }

    std::vector<double> totals(trials, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t b = 0; b < bins; ++b) totals[t] += counts[t * bins + b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        MeanSe const m = mean_se(trials, [&](std::size_t t) { return static_cast<double>(counts[t * bins + b]); });
        double const area = std::numbers::pi * (edges[b + 1] * edges[b + 1] - edges[b] * edges[b]);
        profile.radial_bins.push_back({edges[b], edges[b + 1], m.mean / area, m.se / area, m.mean, m.se});
    }
    MeanSe const total = mean_se(trials, [&](std::size_t t) { return totals[t]; });
    profile.total_mean_count = total.mean;
    profile.total_std_error = total.se;
    return profile;
}

double normal_cdf(double x, double sigma)
{
    return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
}

double ks_distance_normal(std::span<double const> samples, double sigma)
{
    if (samples.empty()) throw PreconditionError("KS distance needs samples");
    if (!(sigma > 0.0)) throw PreconditionError("KS reference needs a positive scale");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double const n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double const f = normal_cdf(sorted[i], sigma);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

CltSummary clt_statistic_sample(CoefficientLaw const& law, DiskPoint u, std::span<DiskPoint const> points,
                                std::span<Complex const> lambdas, std::size_t samples, std::uint64_t seed,
                                RunOptions const& options)
{
    if (points.size() != lambdas.size()) throw LengthMismatch("points and lambdas must have the same length");
    if (points.empty()) throw PreconditionError("linear statistic needs at least one point");
    if (samples < 1000) throw PreconditionError("linear statistic needs at least 1000 samples");

    CltSummary summary;
    summary.samples = samples;
    summary.sigma2 = 0.5 * alpha_square_sum_closed_form(points, lambdas);
    double radius = 0.0;
    for (DiskPoint const& z : points) radius = std::max(radius, mobius(u, z).abs());
    TruncationPolicy const policy = options.policy(radius);
    summary.truncation_degree = required_degree(policy);
    if (std::all_of(lambdas.begin(), lambdas.end(), [](Complex l) { return l == Complex{}; })) {
        summary.sigma2 = 0.0;
        return summary;
    }

    std::vector<double> values(samples);
    run_trials(samples, seed, options.cell, options, [&](std::size_t t, SeededStream const& stream) {
        TruncatedSeries const series = TruncatedSeries::sample(law, stream, policy);
        Complex acc{};
        for (std::size_t i = 0; i < points.size(); ++i) {
            acc += lambdas[i] * pushforward_evaluate(series, u, points[i]);
        }
        values[t] = acc.real();
    });
    MeanSe const m = mean_se(samples, [&](std::size_t t) { return values[t]; });
    summary.empirical_mean = m.mean;
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    summary.empirical_variance = ss / static_cast<double>(samples - 1);
    if (summary.sigma2 > 0.0) summary.ks_distance = ks_distance_normal(values, std::sqrt(summary.sigma2));
    return summary;
}

IndependenceReport independence_experiment(CoefficientLaw const& law, DiskPoint u1, DiskPoint u2,
                                           DiskPoint center, double epsilon, std::size_t trials,
                                           std::uint64_t seed, RunOptions const& options)
{
    require_trials(trials);
    [[maybe_unused]] BallFamily const ball({center}, epsilon);  // validates the ball
    BallPlan const plan1 = plan_ball(u1, center, epsilon, options);
    BallPlan const plan2 = plan_ball(u2, center, epsilon, options);
    bool const same = u1 == u2;

    std::vector<unsigned char> hit1(trials), hit2(trials);
    std::vector<Complex> field(trials);
    CoefficientSource const source = law_source(law);
    run_trials(trials, seed, options.cell, options, [&](std::size_t t, SeededStream const& stream) {
        std::vector<Complex> coefficients;
        ensure_coefficients(source, stream, coefficients, std::max(plan1.degree, plan2.degree) + 1);
        TruncatedSeries const s1 = prefix_series(coefficients, plan1);
        TruncatedSeries const s2 = prefix_series(coefficients, plan2);
        int const c1 = count_with_jitter(s1, plan1, u1, stream, 0, options.roots);
        int const c2 = same ? c1 : count_with_jitter(s2, plan2, u2, stream, 0, options.roots);
        hit1[t] = c1 > 0 ? 1 : 0;
        hit2[t] = c2 > 0 ? 1 : 0;
        field[t] = pushforward_evaluate(s1, u1, center) * std::conj(pushforward_evaluate(s2, u2, center));
    });

    IndependenceReport r;
    r.u1 = u1;
    r.u2 = u2;
    r.center = center;
    r.epsilon = epsilon;
    r.trials = trials;
    r.truncation_degree = std::max(plan1.degree, plan2.degree);
    r.pseudo_hyperbolic_distance = pseudo_hyperbolic_distance(u1, u2);
    r.predicted_field_covariance = cross_covariance(u1, center, u2, center);

    double const n = static_cast<double>(trials);
    auto mean_of = [&](std::vector<unsigned char> const& v) {
        double s = 0.0;
        for (unsigned char x : v) s += x;
        return s / n;
    };
    r.p1 = mean_of(hit1);
    r.p2 = mean_of(hit2);
    // Identical expressions for variance and covariance keep corr == 1 exact when u1 == u2.
    auto cov_of = [&](std::vector<unsigned char> const& a, double ma, std::vector<unsigned char> const& b,
                      double mb) {
        return mean_se(trials, [&](std::size_t t) { return (a[t] - ma) * (b[t] - mb); });
    };
    MeanSe const cov = cov_of(hit1, r.p1, hit2, r.p2);
    double const v1 = cov_of(hit1, r.p1, hit1, r.p1).mean;
    double const v2 = cov_of(hit2, r.p2, hit2, r.p2).mean;
    r.indicator_covariance = cov.mean;
    r.indicator_covariance_se = cov.se;
    if (v1 > 0.0 && v2 > 0.0) {
        r.indicator_correlation = cov.mean / std::sqrt(v1 * v2);
        r.indicator_correlation_se =
            (1.0 - r.indicator_correlation * r.indicator_correlation) / std::sqrt(n);
    } else {
        r.indicator_correlation = std::numeric_limits<double>::quiet_NaN();
        r.indicator_correlation_se = std::numeric_limits<double>::quiet_NaN();
    }

    MeanSe const re = mean_se(trials, [&](std::size_t t) { return field[t].real(); });
    MeanSe const im = mean_se(trials, [&](std::size_t t) { return field[t].imag(); });
    r.field_covariance = {re.mean, im.mean};
    r.field_covariance_se_re = re.se;
    r.field_covariance_se_im = im.se;
    return r;
}

}  // namespace hyperzero

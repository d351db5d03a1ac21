#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "hyperzero/harness.hpp"
#include "hyperzero/parallel.hpp"

#ifndef HYPERZERO_VERSION
#define HYPERZERO_VERSION "0.0.0"
#endif

namespace hyperzero {

namespace {

nlohmann::json complex_json(Complex z)
{
    return nlohmann::json::array({z.real(), z.imag()});
}

std::vector<DiskPoint> disk_points(std::vector<Complex> const& zs)
{
    return {zs.begin(), zs.end()};
}

Cell exact_check(std::string name, double value, double threshold, bool ok)
{
    Cell c;
    c.name = std::move(name);
    c.value = value;
    c.key = {{"threshold", threshold}};
    c.pass = ok;
    return c;
}

Cell statistical_cell(std::string name, double value, double se, std::size_t trials)
{
    Cell c;
    c.name = std::move(name);
    c.value = value;
    c.std_error = se;
    c.trials = trials;
    c.statistical = true;
    return c;
}

void attach_prediction(Cell& c, double prediction)
{
    c.prediction = prediction;
    c.deviation_sigma = deviation_in_sigma(c.value, prediction, c.std_error);
    c.pass = *c.deviation_sigma <= kPassSigma;
}

// sum_k a^k conj(b)^k / (d1 conj(d2)), summed until the geometric tail bound
// drops below `tolerance`.
Complex direct_geometric_sum(Complex a, Complex b, Complex d1, Complex d2, double tolerance)
{
    Complex const ratio = a * std::conj(b);
    Complex const scale = 1.0 / (d1 * std::conj(d2));
    double const rho = std::abs(ratio);
    Complex sum{};
    Complex term = scale;
    for (std::size_t k = 0; k < 100'000'000; ++k) {
        sum += term;
        term *= ratio;
        if (std::abs(term) / (1.0 - rho) < tolerance) break;
    }
    return sum;
}

// --- verify-identities -------------------------------------------------------

std::vector<DiskPoint> u_grid()
{
    std::vector<DiskPoint> us;
    for (double m : {0.0, 0.5, 0.9, 0.99, 0.999}) {
        for (double theta : {0.0, 2.0, -1.1}) {
            us.emplace_back(std::polar(m, theta));
            if (m == 0.0) break;
        }
    }
    return us;
}

std::vector<Cell> verify_identities()
{
    std::vector<Cell> cells;
    constexpr double kTail = 1e-13;

    // Normalized covariance of the pushed-forward field, summed term by term.
    {
        DiskPoint const z1{0.3, 0.0};
        DiskPoint const z2{-0.2, 0.4};
        Complex const closed = q_covariance(z1, z2);
        double worst = 0.0;
        for (DiskPoint u : u_grid()) {
            Complex const direct = direct_geometric_sum(mobius(u, z1).value(), mobius(u, z2).value(),
                                                        delta(u, z1), delta(u, z2), kTail);
            worst = std::max(worst, std::abs(direct - closed));
        }
        cells.push_back(exact_check("q_invariance", worst, 1e-9, worst <= 1e-9));
    }

    // sum_k |alpha_k(u)|^2 against the u-free double sum.
    {
        std::vector<DiskPoint> const pts{{0.3, 0.0}, {-0.2, 0.4}, {0.1, -0.5}};
        std::vector<Complex> const lambdas{{1.0, 0.0}, {0.0, 1.0}, {-0.5, 0.25}};
        double const closed = alpha_square_sum_closed_form(pts, lambdas);
        double worst = 0.0;
        for (DiskPoint u : u_grid()) {
            double rho = 0.0;
            double weight = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                rho = std::max(rho, mobius(u, pts[i]).abs());
                weight += std::abs(lambdas[i]) / std::abs(delta(u, pts[i]));
            }
            auto const degree = static_cast<std::size_t>(
                std::ceil(std::log(kTail * (1.0 - rho * rho) / (weight * weight)) / (2.0 * std::log(rho))));
            std::vector<Complex> const alpha = alpha_coefficients(u, pts, lambdas, std::max<std::size_t>(degree, 1));
            double direct = 0.0;
            for (Complex a : alpha) direct += std::norm(a);
            worst = std::max(worst, std::abs(direct - closed));
        }
        cells.push_back(exact_check("alpha_square_sum", worst, 1e-9, worst <= 1e-9));
    }

    // Fourth-power sum: closed form against direct summation on a 5 x 5 grid.
    {
        std::vector<DiskPoint> const us{{0.0, 0.0}, {0.5, 0.0}, {-0.3, 0.6}, {0.9, 0.0}, {0.0, 0.99}};
        std::vector<DiskPoint> const zs{{0.0, 0.0}, {0.3, 0.0}, {-0.2, 0.4}, {0.0, 0.6}, {-0.7, 0.0}};
        double worst = 0.0;
        for (DiskPoint u : us) {
            for (DiskPoint z : zs) {
                double const phi4 = std::pow(mobius(u, z).abs(), 4);
                double const scale = 1.0 / std::pow(std::abs(delta(u, z)), 4);
                long double sum = 0.0L;
                long double term = scale;
                while (term > 1e-18L * (1.0L - phi4)) {
                    sum += term;
                    term *= phi4;
                }
                worst = std::max(worst, std::abs(static_cast<double>(sum) - alpha_power_sum(u, z, 4.0)));
            }
        }
        cells.push_back(exact_check("alpha_fourth_power", worst, 1e-10, worst <= 1e-10));

        // Along each ray the sum peaks where mobius(u, z) = 0, so the decay is
        // checked from |u| = |z| outward.
        DiskPoint const z{0.3, 0.0};
        bool monotone = true;
        double last = 0.0;
        for (double theta : {0.0, std::numbers::pi / 2, std::numbers::pi}) {
            double previous = std::numeric_limits<double>::infinity();
            for (double m : {0.3, 0.5, 0.9, 0.99, 0.999}) {
                double const v = alpha_power_sum(DiskPoint(std::polar(m, theta)), z, 4.0);
                monotone = monotone && v < previous;
                previous = v;
            }
            last = std::max(last, previous);
        }
        Cell decay = exact_check("alpha_fourth_decay", last, 1e-2, monotone && last < 1e-2);
        decay.key["monotone"] = monotone;
        cells.push_back(decay);
    }

    // Cross-covariance at two parameters against direct summation.
    {
        std::vector<DiskPoint> const us{{0.0, 0.0}, {0.5, 0.0}, {0.9, 0.0}, {-0.9, 0.0}, {0.3, 0.8}};
        std::vector<DiskPoint> const zs{{0.0, 0.0}, {0.3, 0.0}, {-0.2, 0.4}};
        double worst = 0.0;
        for (DiskPoint u1 : us) {
            for (DiskPoint u2 : us) {
                for (DiskPoint z1 : zs) {
                    for (DiskPoint z2 : zs) {
                        Complex const direct = direct_geometric_sum(mobius(u1, z1).value(), mobius(u2, z2).value(),
                                                                    delta(u1, z1), delta(u2, z2), kTail);
                        worst = std::max(worst, std::abs(direct - cross_covariance(u1, z1, u2, z2)));
                    }
                }
            }
        }
        cells.push_back(exact_check("cross_covariance", worst, 1e-9, worst <= 1e-9));
    }

    // Möbius round trip. Absolute error on |u| <= 0.99, |z| <= 0.9; beyond that
    // the inverse map amplifies the rounding of w by (1 - |u|^2) / |1 + conj(u) w|^2,
    // so the error is measured in units of eps * (1 + that factor).
    {
        double worst = 0.0;
        double worst_scaled = 0.0;
        for (DiskPoint u : u_grid()) {
            for (int i = 0; i < 64; ++i) {
                DiskPoint const z(std::polar(0.99 * std::sqrt((i + 0.5) / 64.0), 2.399963 * i));
                Complex const w = mobius(u, z).value();
                double const err = std::abs(mobius_inverse(u, DiskPoint(w)).value() - z.value());
                double const cond = (1.0 - std::norm(u.value())) / std::norm(1.0 + std::conj(u.value()) * w);
                worst_scaled = std::max(worst_scaled, err / (std::numeric_limits<double>::epsilon() * (1.0 + cond)));
                if (u.abs() <= 0.99 && z.abs() <= 0.9) worst = std::max(worst, err);
            }
        }
        Cell c = exact_check("mobius_round_trip", worst, 1e-13, worst <= 1e-13 && worst_scaled <= 16.0);
        c.key["error_over_conditioning"] = worst_scaled;
        cells.push_back(c);
    }

    // Leading principal minors of kernel matrices on pseudo-random point sets.
    {
        double worst = std::numeric_limits<double>::infinity();
        std::uint64_t state = 0x5EEDULL;
        for (int set = 0; set < 50; ++set) {
            std::size_t const n = 1 + static_cast<std::size_t>(set % static_cast<int>(kMaxKernelPoints));
            std::vector<DiskPoint> pts;
            for (std::size_t i = 0; i < n; ++i) {
                double const r = 0.95 * std::sqrt(to_unit_open(state = splitmix64(state)));
                double const t = 2.0 * std::numbers::pi * to_unit_open(state = splitmix64(state));
                pts.emplace_back(std::polar(r, t));
            }
            KernelMatrix const k = kernel_matrix(pts, 1.0);
            for (std::size_t m = 1; m <= n; ++m) {
                std::vector<Complex> sub(m * m);
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < m; ++j) sub[i * m + j] = k(i, j);
                }
                worst = std::min(worst, hermitian_determinant(sub, m) / k.trace());
            }
        }
        cells.push_back(exact_check("kernel_psd", worst, -1e-10, worst >= -1e-10));
    }
    return cells;
}

// --- statistical experiments ---------------------------------------------------

void run_clt(ExperimentConfig const& c, RunOptions const& options, ResultRecord& record)
{
    auto const law = CoefficientLaw::from_name(c.law, c.sparsity);
    auto const pts = disk_points(c.centers);
    CltSummary const s = clt_statistic_sample(law, DiskPoint(c.u_values[0]), pts, c.lambdas, *c.trials,
                                              c.master_seed, options);
    double const n = static_cast<double>(s.samples);
    Cell variance = statistical_cell("variance", s.empirical_variance, s.sigma2 * std::sqrt(2.0 / (n - 1.0)),
                                     s.samples);
    attach_prediction(variance, s.sigma2);
    Cell mean = statistical_cell("mean", s.empirical_mean, std::sqrt(s.sigma2 / n), s.samples);
    attach_prediction(mean, 0.0);
    record.cells.push_back(mean);
    record.cells.push_back(variance);
    if (s.ks_distance) {
        Cell ks;
        ks.name = "ks_distance";
        ks.value = *s.ks_distance;
        ks.trials = s.samples;
        record.cells.push_back(ks);
    }
    record.summary["sigma2"] = s.sigma2;
    record.summary["ks_distance"] = s.ks_distance ? nlohmann::json(*s.ks_distance) : nlohmann::json(nullptr);
    // Asymptotic 1% critical value of the one-sample KS statistic.
    record.summary["ks_critical_1pct"] = 1.6276 / std::sqrt(n);
    record.summary["truncation_degree"] = s.truncation_degree;
}

void run_intensity(ExperimentConfig const& c, RunOptions const& options, ResultRecord& record)
{
    auto const law = CoefficientLaw::from_name(c.law, c.sparsity);
    DiskPoint const u(c.u_values[0]);
    IntensityProfile const p = intensity_profile(law, u, *c.radius, *c.bins, *c.trials, c.master_seed, options);
    bool const gaussian = law.kind() == LawKind::ComplexGaussian;
    for (std::size_t b = 0; b < p.radial_bins.size(); ++b) {
        RadialBin const& bin = p.radial_bins[b];
        Cell cell = statistical_cell("bin" + std::to_string(b), bin.expected_count_per_area, bin.std_error, p.trials);
        cell.key = {{"r_lo", bin.r_lo}, {"r_hi", bin.r_hi}, {"mean_count", bin.mean_count},
                    {"mean_count_std_error", bin.mean_count_std_error}};
        if (gaussian) {
            double const area = std::numbers::pi * (bin.r_hi * bin.r_hi - bin.r_lo * bin.r_lo);
            attach_prediction(cell, (gaussian_expected_count(bin.r_hi) - gaussian_expected_count(bin.r_lo)) / area);
        }
        record.cells.push_back(cell);
    }
    Cell total = statistical_cell("total_count", p.total_mean_count, p.total_std_error, p.trials);
    total.key = {{"radius", *c.radius}};
    if (gaussian) attach_prediction(total, gaussian_expected_count(*c.radius));
    record.cells.push_back(total);
    record.summary["method"] = p.method == RootMethod::GlobalRoots ? "global-roots" : "argument-principle";
    record.summary["truncation_degree"] = p.truncation_degree;
}

void run_correlations(ExperimentConfig const& c, RunOptions const& options, ResultRecord& record)
{
    auto const law = CoefficientLaw::from_name(c.law, c.sparsity);
    auto const us = disk_points(c.u_values);
    auto const pts = disk_points(c.centers);
    std::vector<CorrelationCell> grid =
        correlation_grid(law, us, c.epsilons, pts, *c.trials, c.master_seed, options);
    for (std::size_t iu = 0; iu < us.size(); ++iu) {
        for (std::size_t ie = 0; ie < c.epsilons.size(); ++ie) {
            CorrelationCell const& g = grid[iu * c.epsilons.size() + ie];
            Cell cell = statistical_cell("u" + std::to_string(iu) + "_eps" + std::to_string(ie), g.scaled_value,
                                         g.scaled_std_error, g.estimate.trials);
            cell.hits = g.estimate.hits;
            cell.key = {{"u", complex_json(g.u.value())},
                        {"epsilon", g.epsilon},
                        {"probability", g.estimate.value},
                        {"probability_std_error", g.estimate.std_error},
                        {"truncation_degree", g.estimate.params.truncation_degree}};
            record.cells.push_back(cell);
        }
    }
    try {
        CorrelationLimitReport const limit = extrapolate_correlation_limit(grid, pts.size(), c.epsilons.size());
        Cell cell = statistical_cell("limit", limit.value, limit.combined_error(), *c.trials);
        cell.key = {{"u", complex_json(us.back().value())},
                    {"epsilon", 0.0},
                    {"extrapolated", limit.extrapolated},
                    {"statistical_error", limit.statistical_error},
                    {"extrapolation_error", limit.extrapolation_error}};
        if (c.kernel_c) attach_prediction(cell, kernel_determinant(pts, *c.kernel_c));
        record.cells.push_back(cell);
        if (!c.kernel_c) {
            double const unit = kernel_determinant(pts, 1.0);
            // Best-fit constant c with c^n det[1 / (1 - z_i conj(z_j))^2] = limit.
            record.summary["fitted_kernel_c"] =
                std::pow(std::max(limit.value, 0.0) / unit, 1.0 / static_cast<double>(pts.size()));
        }
    } catch (InsufficientHits const& e) {
        record.summary["limit_error"] = e.what();
    }
}

void run_independence(ExperimentConfig const& c, RunOptions const& options, ResultRecord& record)
{
    auto const law = CoefficientLaw::from_name(c.law, c.sparsity);
    IndependenceReport const r =
        independence_experiment(law, DiskPoint(c.u_values[0]), DiskPoint(c.u_values[1]), DiskPoint(c.centers[0]),
                                c.epsilons[0], *c.trials, c.master_seed, options);
    double const n = static_cast<double>(r.trials);
    record.cells.push_back(statistical_cell("p1", r.p1, std::sqrt(r.p1 * (1.0 - r.p1) / n), r.trials));
    record.cells.push_back(statistical_cell("p2", r.p2, std::sqrt(r.p2 * (1.0 - r.p2) / n), r.trials));
    Cell cov = statistical_cell("indicator_covariance", r.indicator_covariance, r.indicator_covariance_se, r.trials);
    record.cells.push_back(cov);
    if (!std::isnan(r.indicator_correlation)) {
        record.cells.push_back(statistical_cell("indicator_correlation", r.indicator_correlation,
                                                r.indicator_correlation_se, r.trials));
    }
    Cell fre = statistical_cell("field_covariance_re", r.field_covariance.real(), r.field_covariance_se_re, r.trials);
    attach_prediction(fre, r.predicted_field_covariance.real());
    Cell fim = statistical_cell("field_covariance_im", r.field_covariance.imag(), r.field_covariance_se_im, r.trials);
    attach_prediction(fim, r.predicted_field_covariance.imag());
    record.cells.push_back(fre);
    record.cells.push_back(fim);
    record.summary["indicator_correlation"] =
        std::isnan(r.indicator_correlation) ? nlohmann::json(nullptr) : nlohmann::json(r.indicator_correlation);
    record.summary["pseudo_hyperbolic_distance"] = r.pseudo_hyperbolic_distance;
    record.summary["truncation_degree"] = r.truncation_degree;
}

// Residual certificates and count agreement on random truncations, plus
// analytic roots of z^n - a.
void run_roots_bench(ExperimentConfig const& c, RunOptions const& options, ResultRecord& record)
{
    auto const law = CoefficientLaw::from_name(c.law, c.sparsity);
    double const radius = *c.radius;
    std::size_t const trials = *c.trials;
    std::uint64_t const experiment_hash = stable_hash(options.experiment);
    constexpr std::size_t kBallsPerTrial = 4;

    struct Outcome {
        double residual_ratio = 0.0;
        std::size_t zeros = 0;
        std::size_t balls = 0;
        std::size_t mismatches = 0;
        std::size_t anomalies = 0;
    };
    std::vector<Outcome> outcomes(trials);
    for_each_trial(trials, options.threads, [&](std::size_t t) {
        SeededStream const stream{c.master_seed, trial_stream_index(experiment_hash, 0, t)};
        try {
            std::size_t const span = c.max_degree - c.min_degree + 1;
            std::size_t const degree = c.min_degree + splitmix64(stream.key()) % span;
            TruncatedSeries const series =
                TruncatedSeries::from_coefficients(sample_coefficients(law, degree + 1, stream), radius);
            ZeroSet const zs = find_roots(series, radius, options.roots);
            double const scale = coefficient_scale(series.coefficients(), radius);
            Outcome& o = outcomes[t];
            o.zeros = zs.count();
            o.anomalies = zs.multiplicity_anomalies;
            for (Zero const& z : zs.zeros) o.residual_ratio = std::max(o.residual_ratio, z.residual / scale);

            std::uint64_t h = stream.key() ^ 0xB411ULL;
            for (std::size_t b = 0; b < kBallsPerTrial; ++b) {
                double const ball_r = radius * (0.1 + 0.3 * to_unit_open(h = splitmix64(h)));
                double const reach = (radius - (1.0 + 2.0 * kContourJitter) * ball_r) * std::sqrt(to_unit_open(h = splitmix64(h)));
                Complex const center = std::polar(reach, 2.0 * std::numbers::pi * to_unit_open(h = splitmix64(h)));
                double r = ball_r;
                for (int attempt = 0;; ++attempt) {
                    try {
                        int const counted = count_zeros_in_disk(series, DiskPoint(center), r, std::nullopt,
                                                                options.roots);
                        ++o.balls;
                        if (static_cast<std::size_t>(counted) != zs.count_in_ball(center, r)) ++o.mismatches;
                        break;
                    } catch (ContourTooClose const&) {
                        if (attempt >= kMaxJitterAttempts) throw;
                    } catch (QuadratureUnresolved const&) {
                        if (attempt >= kMaxJitterAttempts) throw;
                    }
                    r = ball_r * (1.0 + kContourJitter * (2.0 * to_unit_open(h = splitmix64(h)) - 1.0));
                }
            }
        } catch (Error const& e) {
            throw TrialFailure("trial " + std::to_string(t) + " failed: " + e.what(), t, stream.stream_index,
                               c.master_seed);
        }
    });

    Outcome total;
    for (Outcome const& o : outcomes) {
        total.residual_ratio = std::max(total.residual_ratio, o.residual_ratio);
        total.zeros += o.zeros;
        total.balls += o.balls;
        total.mismatches += o.mismatches;
        total.anomalies += o.anomalies;
    }

    double structured = 0.0;
    for (std::size_t n : {2, 5, 10, 20, 50}) {
        for (Complex a : {Complex{0.5, 0.0}, Complex{0.0, 0.3}, Complex{-0.8, 0.1}}) {
            std::vector<Complex> coeffs(n + 1);
            coeffs[0] = -a;
            coeffs[n] = 1.0;
            std::vector<Complex> found = polynomial_roots(coeffs, options.roots);
            double const mod = std::pow(std::abs(a), 1.0 / static_cast<double>(n));
            double const arg = std::arg(a) / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) {
                Complex const exact = std::polar(mod, arg + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                                static_cast<double>(n));
                double nearest = std::numeric_limits<double>::infinity();
                for (Complex z : found) nearest = std::min(nearest, std::abs(z - exact));
                structured = std::max(structured, nearest);
            }
            if (found.size() != n) structured = std::numeric_limits<double>::infinity();
        }
    }

    Cell residual = exact_check("max_residual_ratio", total.residual_ratio, options.roots.residual_tolerance,
                                total.residual_ratio <= options.roots.residual_tolerance);
    residual.trials = trials;
    Cell mismatches = exact_check("count_mismatches", static_cast<double>(total.mismatches), 0.0,
                                  total.mismatches == 0);
    mismatches.trials = total.balls;
    record.cells.push_back(residual);
    record.cells.push_back(mismatches);
    record.cells.push_back(exact_check("structured_max_error", structured, 1e-10, structured <= 1e-10));
    record.summary["zeros_found"] = total.zeros;
    record.summary["balls_tested"] = total.balls;
    record.summary["multiplicity_anomalies"] = total.anomalies;
}

}  // namespace

double deviation_in_sigma(double a, double b, double combined_error)
{
    if (a == b) return 0.0;
    if (!(combined_error > 0.0)) return std::numeric_limits<double>::infinity();
    return std::abs(a - b) / combined_error;
}

Cell const* ResultRecord::find(std::string_view name) const
{
    auto const it = std::find_if(cells.begin(), cells.end(), [&](Cell const& c) { return c.name == name; });
    return it == cells.end() ? nullptr : &*it;
}

ResultRecord run(ExperimentConfig const& input)
{
    ExperimentConfig const c = with_defaults(input);
    validate(c);

    RunOptions options;
    options.threads = c.threads ? c.threads : default_thread_count();
    options.tail_tolerance = c.tail_tolerance;
    options.safety_factor = c.safety_factor;
    options.roots = c.roots;
    options.experiment = std::string(experiment_name(c.experiment));

    ResultRecord record;
    record.experiment = options.experiment;
    record.config = config_to_json(c);
    record.meta = {{"version", HYPERZERO_VERSION},
                   {"master_seed", c.master_seed},
                   {"law", CoefficientLaw::from_name(c.law, c.sparsity).name()},
                   {"threads", options.threads}};

    auto const start = std::chrono::steady_clock::now();
    try {
        switch (c.experiment) {
        case Experiment::VerifyIdentities: record.cells = verify_identities(); break;
        case Experiment::Clt: run_clt(c, options, record); break;
        case Experiment::Intensity: run_intensity(c, options, record); break;
        case Experiment::Correlations: run_correlations(c, options, record); break;
        case Experiment::Independence: run_independence(c, options, record); break;
        case Experiment::RootsBench: run_roots_bench(c, options, record); break;
        }
    } catch (TrialFailure const& e) {
        record.complete = false;
        record.summary["failure"] = {{"message", e.what()},
                                     {"trial", e.trial()},
                                     {"stream_index", e.stream_index()},
                                     {"master_seed", e.master_seed()}};
    }
    record.meta["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = record.complete;
    double worst = 0.0;
    for (Cell const& cell : record.cells) {
        if (cell.pass) pass = pass && *cell.pass;
        if (cell.deviation_sigma) worst = std::max(worst, *cell.deviation_sigma);
    }
    record.summary["pass"] = pass;
    record.summary["complete"] = record.complete;
    record.summary["max_deviation_sigma"] = worst;
    return record;
}

namespace {

void require_same(nlohmann::json const& a, nlohmann::json const& b, char const* field)
{
    nlohmann::json const va = a.contains(field) ? a[field] : nlohmann::json(nullptr);
    nlohmann::json const vb = b.contains(field) ? b[field] : nlohmann::json(nullptr);
    if (va != vb) {
        throw GeometryMismatch(std::string("records differ in ") + field + ": " + va.dump() + " vs " + vb.dump());
    }
}

}  // namespace

ComparisonReport compare(ResultRecord const& record, Prediction const& prediction)
{
    ComparisonReport report;
    if (auto const* kernel = std::get_if<KernelPrediction>(&prediction)) {
        if (record.experiment != "correlations") {
            throw GeometryMismatch("kernel predictions apply to correlations records, not " + record.experiment);
        }
        Cell const* limit = record.find("limit");
        if (!limit) throw GeometryMismatch("record has no extrapolated limit cell");
        std::vector<DiskPoint> pts;
        for (auto const& z : record.config.at("centers")) pts.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        ComparisonEntry e;
        e.cell = limit->name;
        e.value = limit->value;
        e.prediction = kernel_determinant(pts, kernel->c);
        e.combined_error = limit->std_error;
        e.deviation_sigma = deviation_in_sigma(e.value, e.prediction, e.combined_error);
        e.pass = e.deviation_sigma <= kPassSigma;
        report.entries.push_back(e);
    } else {
        ResultRecord const& base = std::get<ResultRecord>(prediction);
        if (base.experiment != record.experiment) {
            throw GeometryMismatch("cannot compare " + record.experiment + " against " + base.experiment);
        }
        for (char const* field : {"u", "centers", "epsilons", "lambdas", "radius", "bins"}) {
            require_same(record.config, base.config, field);
        }
        for (Cell const& cell : record.cells) {
            if (!cell.statistical) continue;
            Cell const* other = base.find(cell.name);
            if (!other) throw GeometryMismatch("baseline has no cell named " + cell.name);
            ComparisonEntry e;
            e.cell = cell.name;
            e.value = cell.value;
            e.prediction = other->value;
            e.combined_error = std::hypot(cell.std_error, other->std_error);
            e.deviation_sigma = deviation_in_sigma(e.value, e.prediction, e.combined_error);
            e.pass = e.deviation_sigma <= kPassSigma;
            report.entries.push_back(e);
        }
    }
    for (ComparisonEntry const& e : report.entries) report.pass = report.pass && e.pass;
    return report;
}

nlohmann::json to_json(ComparisonReport const& report)
{
    nlohmann::json entries = nlohmann::json::array();
    for (ComparisonEntry const& e : report.entries) {
        entries.push_back({{"cell", e.cell},
                           {"value", e.value},
                           {"prediction", e.prediction},
                           {"combined_error", e.combined_error},
                           {"deviation_sigma", e.deviation_sigma},
                           {"pass", e.pass}});
    }
    return {{"entries", entries}, {"pass", report.pass}};
}

}  // namespace hyperzero

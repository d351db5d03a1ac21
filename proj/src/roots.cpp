#include "hyperzero/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hyperzero/error.hpp"

namespace hyperzero {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct NewtonStep {
    Complex ratio;       // p(z) / p'(z)
    bool negligible;     // |p(z)| is at rounding level
};

// Newton ratio with the reversed polynomial outside the unit circle, so that
// large |z| never overflows.
NewtonStep newton_ratio(std::span<Complex const> c, Complex z)
{
    std::size_t const d = c.size() - 1;
    if (std::abs(z) <= 1.0) {
        Complex p{}, dp{};
        double err = 0.0;  // running rounding-error estimate of Horner's rule
        double const az = std::abs(z);
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
            err = err * az + std::abs(p);
        }
        return {p / dp, std::abs(p) <= 4.0 * kEps * err};
    }
    Complex const y = 1.0 / z;
    double const ay = std::abs(y);
    Complex q{}, dq{};
    double err = 0.0;
    for (Complex const& ck : c) {  // reversed polynomial: coefficient of y^k is c_{d-k}
        dq = dq * y + q;
        q = q * y + ck;
        err = err * ay + std::abs(q);
    }
    Complex const denom = static_cast<double>(d) * q - y * dq;
    return {z * q / denom, std::abs(q) <= 4.0 * kEps * err};
}

// Initial approximations on circles whose radii follow the upper convex hull
// of (k, log|c_k|).
std::vector<Complex> initial_guesses(std::span<Complex const> c)
{
    std::size_t const d = c.size() - 1;
    std::vector<std::size_t> hull;
    std::vector<double> logc(c.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k <= d; ++k) {
        if (c[k] != Complex{}) {
            logc[k] = std::log(std::abs(c[k]));
        }
    }
    for (std::size_t k = 0; k <= d; ++k) {
        if (!std::isfinite(logc[k])) continue;
        while (hull.size() >= 2) {
            std::size_t const a = hull[hull.size() - 2];
            std::size_t const b = hull.back();
            // Drop b if it lies on or below the segment a -> k.
            double const cross = (static_cast<double>(b) - a) * (logc[k] - logc[a]) -
                                 (logc[b] - logc[a]) * (static_cast<double>(k) - a);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(k);
    }
    std::vector<Complex> z;
    z.reserve(d);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        std::size_t const i = hull[s];
        std::size_t const j = hull[s + 1];
        std::size_t const count = j - i;
        double const radius = std::exp((logc[i] - logc[j]) / static_cast<double>(count));
        double const offset = 0.7 * static_cast<double>(s) + 0.4;
        for (std::size_t t = 0; t < count; ++t) {
            double const angle = kTwoPi * static_cast<double>(t) / static_cast<double>(count) + offset;
            z.push_back(std::polar(radius, angle));
        }
    }
    return z;
}

std::vector<Complex> aberth(std::span<Complex const> c, int max_iterations)
{
    std::size_t const d = c.size() - 1;
    std::vector<Complex> z = initial_guesses(c);
    std::vector<char> done(d, 0);
    std::size_t remaining = d;
    for (int iter = 0; iter < max_iterations && remaining > 0; ++iter) {
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            NewtonStep const step = newton_ratio(c, z[i]);
            if (step.negligible) {
                done[i] = 1;
                --remaining;
                continue;
            }
            Complex sum{};
            for (std::size_t j = 0; j < d; ++j) {
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            }
            Complex const correction = step.ratio / (1.0 - step.ratio * sum);
            z[i] -= correction;
            if (std::abs(correction) <= kEps * std::abs(z[i])) {
                done[i] = 1;
                --remaining;
            }
        }
    }
    if (remaining > 0) {
        std::ostringstream msg;
        msg << remaining << " of " << d << " roots unconverged after " << max_iterations
            << " iterations";
        throw NonConvergence(msg.str());
    }
    return z;
}

// Newton steps on the full polynomial while the residual keeps shrinking.
Complex polish(std::span<Complex const> c, Complex z, double target)
{
    double best = std::abs(horner(c, z));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        Complex p{}, dp{};
        for (auto k = c.rbegin(); k != c.rend(); ++k) {
            dp = dp * z + p;
            p = p * z + *k;
        }
        if (dp == Complex{}) break;
        Complex const next = z - p / dp;
        double const r = std::abs(horner(c, next));
        if (!(r < best)) break;
        z = next;
        best = r;
        if (best <= 0.01 * target) break;
    }
    return z;
}

}  // namespace

void RootConfig::validate() const
{
    if (!(residual_tolerance > 0.0) || max_iterations <= 0 || quadrature_nodes <= 0) {
        throw PreconditionError("root configuration values must all be positive");
    }
}

std::size_t ZeroSet::count() const
{
    std::size_t n = 0;
    for (Zero const& z : zeros) n += static_cast<std::size_t>(z.multiplicity);
    return n;
}

std::size_t ZeroSet::count_in_ball(Complex center, double radius) const
{
    std::size_t n = 0;
    for (Zero const& z : zeros) {
        if (std::abs(z.location.value() - center) < radius) n += static_cast<std::size_t>(z.multiplicity);
    }
    return n;
}

double coefficient_scale(std::span<Complex const> coefficients, double radius)
{
    double scale = 0.0;
    double power = 1.0;
    for (Complex const& ck : coefficients) {
        scale = std::max(scale, std::abs(ck) * power);
        power *= radius;
    }
    return scale;
}

std::vector<Complex> polynomial_roots(std::span<Complex const> coefficients, RootConfig const& config)
{
    config.validate();
    double cmax = 0.0;
    for (Complex const& ck : coefficients) cmax = std::max(cmax, std::abs(ck));
    if (coefficients.empty() || cmax == 0.0) {
        throw DegenerateInput("all coefficients vanish");
    }
    std::size_t top = coefficients.size() - 1;
    while (std::abs(coefficients[top]) < kTrimRelativeTolerance * cmax) --top;
    std::size_t low = 0;
    while (coefficients[low] == Complex{}) ++low;

    std::vector<Complex> roots(low, Complex{});
    if (top > low) {
        auto const reduced = coefficients.subspan(low, top - low + 1);
        if (top - low == 1) {
            roots.push_back(-reduced[0] / reduced[1]);
        } else {
            auto const z = aberth(reduced, config.max_iterations);
            roots.insert(roots.end(), z.begin(), z.end());
        }
    }
    return roots;
}

ZeroSet find_roots(TruncatedSeries const& series, double search_radius, RootConfig const& config)
{
    config.validate();
    if (!(search_radius > 0.0)) {
        throw PreconditionError("search radius must be positive");
    }
    series.check_certified(search_radius);

    auto const c = series.coefficients();
    double const scale = coefficient_scale(c, search_radius);
    double const allowed = config.residual_tolerance * scale;
    auto const all = polynomial_roots(c, config);

    std::vector<Complex> inside;
    for (Complex z : all) {
        // Polish anything that could land inside after refinement.
        if (std::abs(z) > search_radius * (1.0 + 1e-6)) continue;
        if (z != Complex{}) z = polish(c, z, allowed);
        if (std::abs(z) <= search_radius) inside.push_back(z);
    }
    std::sort(inside.begin(), inside.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    ZeroSet zs;
    zs.search_radius = search_radius;
    zs.method = RootMethod::GlobalRoots;
    std::vector<char> used(inside.size(), 0);
    for (std::size_t i = 0; i < inside.size(); ++i) {
        if (used[i]) continue;
        used[i] = 1;
        Complex sum = inside[i];
        int mult = 1;
        for (std::size_t j = i + 1; j < inside.size(); ++j) {
            if (!used[j] && std::abs(inside[j] - inside[i]) <= kMultiplicityClusterRadius) {
                used[j] = 1;
                sum += inside[j];
                ++mult;
            }
        }
        Complex const loc = sum / static_cast<double>(mult);
        double const residual = std::abs(horner(c, loc));
        if (residual > allowed) {
            std::ostringstream msg;
            msg << "root " << loc << " has residual " << residual << " above certificate " << allowed;
            throw NonConvergence(msg.str());
        }
        if (mult > 1) ++zs.multiplicity_anomalies;
        zs.zeros.push_back({DiskPoint{loc}, residual, mult});
    }
    return zs;
}

namespace {

struct QuadratureResult {
    Complex full;      // trapezoidal sum with all nodes
    Complex half;      // same sum over the even nodes only
    double min_abs;    // min |f| over the contour images
};

QuadratureResult winding_sum(std::span<Complex const> c, Complex center, double radius, DiskPoint u,
                             int nodes)
{
    std::size_t const m = static_cast<std::size_t>(nodes);
    std::vector<Complex> z(m), w(m), f(m), df(m);
    for (std::size_t j = 0; j < m; ++j) {
        double const theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
        z[j] = center + std::polar(radius, theta);
        w[j] = (z[j] - u.value()) / (1.0 - std::conj(u.value()) * z[j]);
    }
    horner_with_derivative(c, w, f, df);
    QuadratureResult r{{}, {}, std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < m; ++j) {
        r.min_abs = std::min(r.min_abs, std::abs(f[j]));
        // g'/g dz with g = f o mobius(u, .), dz = i (z - center) dtheta.
        Complex const term = df[j] / f[j] * mobius_derivative(u, z[j]) * (z[j] - center);
        r.full += term;
        if (j % 2 == 0) r.half += term;
    }
    r.full /= static_cast<double>(m);
    r.half /= static_cast<double>((m + 1) / 2);
    return r;
}

}  // namespace

int count_zeros_in_disk(TruncatedSeries const& series, DiskPoint center, double radius,
                        std::optional<DiskPoint> u, RootConfig const& config)
{
    config.validate();
    if (!(radius > 0.0) || !(center.abs() + radius < 1.0)) {
        throw PreconditionError("counting ball must have positive radius and lie inside the disk");
    }
    DiskPoint const uu = u.value_or(DiskPoint{});
    EuclideanDisk const image = mobius_image_disk(uu, center.value(), radius);
    series.check_certified(image.max_modulus());

    auto const c = series.coefficients();
    double const floor = 1e3 * kEps * coefficient_scale(c, image.max_modulus());
    int nodes = std::max(config.quadrature_nodes, 8);
    constexpr int kMaxDoublings = 3;
    for (int attempt = 0; attempt <= kMaxDoublings; ++attempt, nodes *= 2) {
        QuadratureResult const q = winding_sum(c, center.value(), radius, uu, nodes);
        if (!(q.min_abs >= floor)) {
            std::ostringstream msg;
            msg << "min |g| = " << q.min_abs << " on the contour is below " << floor;
            throw ContourTooClose(msg.str());
        }
        double const n = std::round(q.full.real());
        if (std::abs(q.full - n) <= 0.1 && std::abs(q.half - n) < 0.5) {
            return static_cast<int>(n);
        }
    }
    std::ostringstream msg;
    msg << "winding number unresolved with " << nodes / 2 << " nodes";
    throw QuadratureUnresolved(msg.str());
}

}  // namespace hyperzero

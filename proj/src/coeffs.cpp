#include "hyperzero/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyperzero/error.hpp"

namespace hyperzero {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t law_salt(CoefficientLaw const& law) noexcept
{
    return splitmix64(0xC0EFF1C1E27ULL + static_cast<std::uint64_t>(law.kind()));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    return mix64(x + kGolden);
}

std::uint64_t stable_hash(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t trial_stream_index(std::uint64_t experiment_hash, std::uint64_t cell,
                                 std::uint64_t trial) noexcept
{
    return splitmix64(splitmix64(splitmix64(experiment_hash) ^ cell) ^ trial);
}

double to_unit_open(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t SeededStream::key() const noexcept
{
    return splitmix64(splitmix64(master_seed) ^ mix64(stream_index ^ 0x5DEECE66DULL));
}

std::uint64_t SeededStream::word(std::uint64_t j) const noexcept
{
    // SplitMix64 evaluated at an arbitrary position: counter-based by construction.
    return mix64(key() + (j + 1) * kGolden);
}

CoefficientLaw CoefficientLaw::sparse(double p)
{
    if (!(p > 0.0 && p <= 1.0)) {
        throw PreconditionError("sparse law needs 0 < p <= 1");
    }
    return CoefficientLaw{LawKind::SparseThreePoint, p};
}

CoefficientLaw CoefficientLaw::from_name(std::string_view name, double sparsity)
{
    if (name == "gaussian") return gaussian();
    if (name == "rademacher") return rademacher();
    if (name == "uniform") return uniform_square();
    if (name == "sparse") return sparse(sparsity);
    throw PreconditionError("unknown coefficient law '" + std::string(name) +
                            "' (expected gaussian|rademacher|uniform|sparse)");
}

std::string CoefficientLaw::name() const
{
    switch (kind_) {
    case LawKind::ComplexGaussian: return "gaussian";
    case LawKind::ComplexRademacher: return "rademacher";
    case LawKind::UniformSquare: return "uniform";
    case LawKind::SparseThreePoint: return "sparse";
    }
    return "unknown";
}

Complex CoefficientLaw::draw(std::uint64_t bits0, std::uint64_t bits1) const
{
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    switch (kind_) {
    case LawKind::ComplexGaussian: {
        // Box-Muller: |X|^2 ~ Exp(1), uniform phase; Re and Im are independent N(0, 1/2).
        double const radius = std::sqrt(-std::log(to_unit_open(bits0)));
        double const angle = 2.0 * std::numbers::pi * to_unit_open(bits1);
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }
    case LawKind::ComplexRademacher:
        return {(bits0 >> 63) ? inv_sqrt2 : -inv_sqrt2, (bits1 >> 63) ? inv_sqrt2 : -inv_sqrt2};
    case LawKind::UniformSquare: {
        double const half_width = std::sqrt(1.5);
        return {half_width * (2.0 * to_unit_open(bits0) - 1.0),
                half_width * (2.0 * to_unit_open(bits1) - 1.0)};
    }
    case LawKind::SparseThreePoint: {
        if (to_unit_open(bits0) >= sparsity_) {
            return {};
        }
        double const a = inv_sqrt2 / std::sqrt(sparsity_);
        return {(bits1 >> 63) ? a : -a, ((bits1 >> 62) & 1U) ? a : -a};
    }
    }
    return {};
}

void sample_coefficients_into(CoefficientLaw const& law, SeededStream const& stream,
                              std::size_t first, std::span<Complex> out)
{
    std::uint64_t const key = stream.key() ^ law_salt(law);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t const k = first + i;
        std::uint64_t const w0 = mix64(key + (2 * k + 1) * kGolden);
        std::uint64_t const w1 = mix64(key + (2 * k + 2) * kGolden);
        out[i] = law.draw(w0, w1);
    }
}

std::vector<Complex> sample_coefficients(CoefficientLaw const& law, std::size_t count,
                                         SeededStream const& stream)
{
    std::vector<Complex> out(count);
    sample_coefficients_into(law, stream, 0, out);
    return out;
}

double MomentEstimate::deviation_sigma() const
{
    double const diff = std::abs(value - target);
    if (std_error > 0.0) {
        return diff / std_error;
    }
    return diff > 1e-12 * std::max(1.0, std::abs(target)) ? INFINITY : 0.0;
}

bool MomentReport::any_flagged() const
{
    return mean_re.flagged || mean_im.flagged || var_re.flagged || var_im.flagged ||
           cov_re_im.flagged || mean_abs2.flagged;
}

namespace {

// Mean of a derived quantity with its standard error, plus the flag.
template <class F>
MomentEstimate estimate(std::span<Complex const> samples, double target, F f)
{
    double const n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (Complex const& x : samples) {
        sum += f(x);
    }
    double const mean = sum / n;
    double ss = 0.0;
    for (Complex const& x : samples) {
        double const d = f(x) - mean;
        ss += d * d;
    }
    MomentEstimate m;
    m.value = mean;
    m.target = target;
    m.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    m.flagged = m.deviation_sigma() > kMomentFlagSigma;
    return m;
}

}  // namespace

MomentReport verify_moments(std::span<Complex const> samples)
{
    if (samples.empty()) {
        throw PreconditionError("moment check needs at least one sample");
    }
    MomentReport r;
    r.samples = samples.size();
    r.mean_re = estimate(samples, 0.0, [](Complex x) { return x.real(); });
    r.mean_im = estimate(samples, 0.0, [](Complex x) { return x.imag(); });
    r.var_re = estimate(samples, 0.5, [](Complex x) { return x.real() * x.real(); });
    r.var_im = estimate(samples, 0.5, [](Complex x) { return x.imag() * x.imag(); });
    r.cov_re_im = estimate(samples, 0.0, [](Complex x) { return x.real() * x.imag(); });
    r.mean_abs2 = estimate(samples, 1.0, [](Complex x) { return std::norm(x); });
    return r;
}

MomentReport verify_moments(CoefficientLaw const& law, std::size_t samples,
                            SeededStream const& stream)
{
    if (samples < 1000) {
        throw PreconditionError("moment check needs at least 1000 samples");
    }
    auto const draws = sample_coefficients(law, samples, stream);
    return verify_moments(draws);
}

}  // namespace hyperzero

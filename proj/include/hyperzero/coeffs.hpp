#pragma once

// I.i.d. complex coefficient laws with mean zero, isotropic unit variance
// (E[(Re X)^2] = E[(Im X)^2] = 1/2, E[Re X Im X] = 0), and counter-based
// reproducible sample streams.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperzero {

using Complex = std::complex<double>;

enum class LawKind {
    ComplexGaussian,    // density exp(-|z|^2) / pi
    ComplexRademacher,  // uniform on (+-1 +- i) / sqrt(2)
    UniformSquare,      // Re, Im independent uniform on [-sqrt(3/2), sqrt(3/2)]
    SparseThreePoint,   // 0 w.p. 1 - p, else (+-1 +- i) / sqrt(2p)
};

class CoefficientLaw {
public:
    static constexpr double kDefaultSparsity = 0.1;

    static CoefficientLaw gaussian() { return CoefficientLaw{LawKind::ComplexGaussian}; }
    static CoefficientLaw rademacher() { return CoefficientLaw{LawKind::ComplexRademacher}; }
    static CoefficientLaw uniform_square() { return CoefficientLaw{LawKind::UniformSquare}; }
    static CoefficientLaw sparse(double p = kDefaultSparsity);

    /// Parses the CLI names gaussian|rademacher|uniform|sparse.
    static CoefficientLaw from_name(std::string_view name, double sparsity = kDefaultSparsity);

    LawKind kind() const noexcept { return kind_; }
    /// Probability of a nonzero draw; 1 for every law except SparseThreePoint.
    double sparsity() const noexcept { return sparsity_; }
    std::string name() const;

    /// One draw from the law, given two independent uniform 64-bit words.
    Complex draw(std::uint64_t bits0, std::uint64_t bits1) const;

    friend bool operator==(CoefficientLaw const&, CoefficientLaw const&) = default;

private:
    explicit CoefficientLaw(LawKind kind, double sparsity = 1.0) : kind_(kind), sparsity_(sparsity) {}

    LawKind kind_;
    double sparsity_;
};

/// Identifies one reproducible coefficient sequence. Draw k of the stream is a
/// pure function of (master_seed, stream_index, k).
struct SeededStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    std::uint64_t key() const noexcept;
    /// The j-th raw 64-bit word of the stream.
    std::uint64_t word(std::uint64_t j) const noexcept;

    friend bool operator==(SeededStream const&, SeededStream const&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text) noexcept;
/// Stream index of trial `trial` of grid cell `cell` in the experiment named by `experiment_hash`.
std::uint64_t trial_stream_index(std::uint64_t experiment_hash, std::uint64_t cell,
                                 std::uint64_t trial) noexcept;
/// Maps a 64-bit word to a double in the open interval (0, 1).
double to_unit_open(std::uint64_t bits) noexcept;

std::vector<Complex> sample_coefficients(CoefficientLaw const& law, std::size_t count,
                                         SeededStream const& stream);

/// Writes coefficients first .. first + out.size() - 1 of the stream into `out`.
void sample_coefficients_into(CoefficientLaw const& law, SeededStream const& stream,
                              std::size_t first, std::span<Complex> out);

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    bool flagged = false;

    double deviation_sigma() const;
};

struct MomentReport {
    std::size_t samples = 0;
    MomentEstimate mean_re;
    MomentEstimate mean_im;
    MomentEstimate var_re;
    MomentEstimate var_im;
    MomentEstimate cov_re_im;
    MomentEstimate mean_abs2;

    bool any_flagged() const;
};

inline constexpr double kMomentFlagSigma = 4.0;

/// Empirical moments of `samples` against the isotropic unit-variance targets.
MomentReport verify_moments(std::span<Complex const> samples);

/// Samples `samples` draws (>= 1000) from `law` and checks their moments.
MomentReport verify_moments(CoefficientLaw const& law, std::size_t samples,
                            SeededStream const& stream);

}  // namespace hyperzero

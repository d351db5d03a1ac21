#pragma once

// Experiment configuration, orchestration, and result records.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hyperzero/error.hpp"
#include "hyperzero/pointproc.hpp"

namespace hyperzero {

enum class Experiment { VerifyIdentities, Clt, Intensity, Correlations, Independence, RootsBench };

std::string_view experiment_name(Experiment e);

/// Field-level validation failure; what() lists every offending field.
class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(std::vector<std::string> problems);
    std::vector<std::string> const& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

Experiment parse_experiment(std::string_view name);

struct ExperimentConfig {
    Experiment experiment = Experiment::VerifyIdentities;
    std::string law = "gaussian";
    double sparsity = CoefficientLaw::kDefaultSparsity;
    std::vector<Complex> u_values;
    std::vector<Complex> centers;
    std::vector<double> epsilons;
    std::vector<Complex> lambdas;
    std::optional<double> radius;
    std::optional<std::size_t> bins;
    std::optional<std::size_t> trials;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;  // 0: HYPERZERO_THREADS or 1
    double tail_tolerance = TruncationPolicy::kDefaultTailTolerance;
    double safety_factor = TruncationPolicy::kDefaultSafetyFactor;
    RootConfig roots;
    std::size_t min_degree = 20;
    std::size_t max_degree = 200;
    std::string out;
    std::string csv;
    std::optional<double> kernel_c;
    std::string baseline;

    friend bool operator==(ExperimentConfig const&, ExperimentConfig const&);
};

/// Parses the key = value / [table] text format.
ExperimentConfig parse_config(std::string const& text);
ExperimentConfig load_config(std::filesystem::path const& path);
std::string serialize_config(ExperimentConfig const& config);

/// Fills per-experiment defaults for fields left empty (except trials).
ExperimentConfig with_defaults(ExperimentConfig config);

/// Throws ConfigInvalid naming every field outside its operation's preconditions.
void validate(ExperimentConfig const& config);

/// Parses "re" or "re,im".
Complex parse_complex(std::string_view text);

nlohmann::json config_to_json(ExperimentConfig const& config);

struct Cell {
    std::string name;
    nlohmann::json key = nlohmann::json::object();  // geometry of the cell
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    bool statistical = false;  // Monte Carlo estimate, comparable across records
    std::optional<double> prediction;
    std::optional<double> deviation_sigma;
    std::optional<bool> pass;
};

struct ResultRecord {
    std::string experiment;
    nlohmann::json config = nlohmann::json::object();
    std::vector<Cell> cells;
    nlohmann::json summary = nlohmann::json::object();
    nlohmann::json meta = nlohmann::json::object();
    bool complete = true;

    Cell const* find(std::string_view name) const;
};

nlohmann::json to_json(ResultRecord const& record);
ResultRecord record_from_json(nlohmann::json const& j);
void write_record(std::filesystem::path const& path, ResultRecord const& record);
ResultRecord read_record(std::filesystem::path const& path);
void write_cells_csv(std::filesystem::path const& path, ResultRecord const& record);

/// Runs the configured experiment. Trial failures do not throw: the record
/// comes back with complete == false and the failure in its summary.
ResultRecord run(ExperimentConfig const& config);

/// Statistical comparisons pass at this many combined standard errors.
inline constexpr double kPassSigma = 4.0;

/// |a - b| / combined error; 0 when both agree exactly with zero error.
double deviation_in_sigma(double a, double b, double combined_error);

struct KernelPrediction {
    double c = 1.0;
};

using Prediction = std::variant<KernelPrediction, ResultRecord>;

struct ComparisonEntry {
    std::string cell;
    double value = 0.0;
    double prediction = 0.0;
    double combined_error = 0.0;
    double deviation_sigma = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    bool pass = true;
};

/// Kernel prediction: the extrapolated eps -> 0 cell of a correlations record
/// against det K(z_i, z_j). Baseline: every statistical cell against the cell
/// of the same name. Throws GeometryMismatch for incompatible records.
ComparisonReport compare(ResultRecord const& record, Prediction const& prediction);
nlohmann::json to_json(ComparisonReport const& report);

}  // namespace hyperzero

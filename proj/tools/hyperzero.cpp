// hyperzero: run one experiment, write its JSON record, and optionally
// compare it against a kernel prediction or a baseline record.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperzero/harness.hpp"

namespace hz = hyperzero;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kTrialFailure = 2, kComparisonFailure = 3 };

struct Overrides {
    std::string experiment;
    std::string config_path;
    std::optional<std::string> law;
    std::vector<std::string> law_params;
    std::vector<std::string> u;
    std::vector<std::string> centers;
    std::vector<std::string> lambdas;
    std::vector<double> epsilons;
    std::optional<double> radius;
    std::optional<std::size_t> bins;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> csv;
    std::optional<unsigned> threads;
    std::optional<double> kernel_c;
    std::optional<std::string> baseline;
    std::optional<int> nodes;
    std::optional<double> tail_tolerance;
    std::optional<std::size_t> min_degree;
    std::optional<std::size_t> max_degree;
};

hz::ExperimentConfig build_config(Overrides const& o)
{
    hz::ExperimentConfig c = o.config_path.empty() ? hz::ExperimentConfig{} : hz::load_config(o.config_path);
    if (!o.experiment.empty()) c.experiment = hz::parse_experiment(o.experiment);

    std::vector<std::string> problems;
    auto complex_list = [&](std::vector<std::string> const& items, char const* flag) {
        std::vector<hz::Complex> out;
        for (auto const& s : items) {
            try {
                out.push_back(hz::parse_complex(s));
            } catch (hz::Error const& e) {
                problems.push_back(std::string(flag) + ": " + e.what());
            }
        }
        return out;
    };
    if (o.law) c.law = *o.law;
    for (auto const& kv : o.law_params) {
        auto const eq = kv.find('=');
        std::string const key = kv.substr(0, eq);
        if (eq == std::string::npos || key != "p") {
            problems.push_back("--law-param: expected p=VALUE, got '" + kv + "'");
            continue;
        }
        try {
            c.sparsity = std::stod(kv.substr(eq + 1));
        } catch (std::exception const&) {
            problems.push_back("--law-param: not a number in '" + kv + "'");
        }
    }
    if (!o.u.empty()) c.u_values = complex_list(o.u, "--u");
    if (!o.centers.empty()) c.centers = complex_list(o.centers, "--center");
    if (!o.lambdas.empty()) c.lambdas = complex_list(o.lambdas, "--lambda");
    if (!o.epsilons.empty()) c.epsilons = o.epsilons;
    if (o.radius) c.radius = o.radius;
    if (o.bins) c.bins = o.bins;
    if (o.trials) c.trials = o.trials;
    if (o.seed) c.master_seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.csv) c.csv = *o.csv;
    if (o.threads) c.threads = *o.threads;
    if (o.kernel_c) c.kernel_c = o.kernel_c;
    if (o.baseline) c.baseline = *o.baseline;
    if (o.nodes) c.roots.quadrature_nodes = *o.nodes;
    if (o.tail_tolerance) c.tail_tolerance = *o.tail_tolerance;
    if (o.min_degree) c.min_degree = *o.min_degree;
    if (o.max_degree) c.max_degree = *o.max_degree;
    if (!problems.empty()) throw hz::ConfigInvalid(problems);

    c = hz::with_defaults(c);
    hz::validate(c);
    return c;
}

void print_summary(hz::ResultRecord const& record)
{
    std::cerr << record.experiment << ": " << record.cells.size() << " cells, "
              << (record.complete ? "complete" : "INCOMPLETE") << '\n';
    for (hz::Cell const& c : record.cells) {
        std::cerr << "  " << c.name << " = " << c.value;
        if (c.statistical) std::cerr << " +- " << c.std_error;
        if (c.prediction) std::cerr << "  (prediction " << *c.prediction << ")";
        if (c.pass) std::cerr << (*c.pass ? "  ok" : "  FAIL");
        std::cerr << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zero statistics of random power series on the unit disk"};
    app.set_version_flag("--version", std::string(HYPERZERO_VERSION));
    Overrides o;
    app.add_option("experiment", o.experiment,
                   "verify-identities | clt | intensity | correlations | independence | roots-bench");
    app.add_option("--config", o.config_path, "Experiment file (key = value with [tables])");
    app.add_option("--law", o.law, "gaussian | rademacher | uniform | sparse");
    app.add_option("--law-param", o.law_params, "Law parameter K=V (sparse: p=0.1)");
    app.add_option("--u", o.u, "Mobius parameter RE or RE,IM (repeatable)");
    app.add_option("--center", o.centers, "Ball center or evaluation point RE,IM (repeatable)");
    app.add_option("--lambda", o.lambdas, "CLT weight RE,IM, one per center (repeatable)");
    app.add_option("--epsilon", o.epsilons, "Ball radius (repeatable, decreasing)");
    app.add_option("--radius", o.radius, "Search radius for intensity and roots-bench");
    app.add_option("--bins", o.bins, "Radial bins for intensity");
    app.add_option("--trials", o.trials, "Monte Carlo trials per cell");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--out", o.out, "Write the JSON record here instead of stdout");
    app.add_option("--csv", o.csv, "Also write a flat CSV of cells");
    app.add_option("--threads", o.threads, "Worker threads (default: HYPERZERO_THREADS or 1)");
    app.add_option("--kernel-c", o.kernel_c, "Compare the extrapolated limit against det K with this constant");
    app.add_option("--baseline", o.baseline, "Compare every statistical cell against this record");
    app.add_option("--nodes", o.nodes, "Initial quadrature nodes of the argument principle");
    app.add_option("--tail-tolerance", o.tail_tolerance, "Truncation tail tolerance");
    app.add_option("--min-degree", o.min_degree, "roots-bench: smallest degree");
    app.add_option("--max-degree", o.max_degree, "roots-bench: largest degree");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    hz::ExperimentConfig config;
    try {
        config = build_config(o);
    } catch (hz::Error const& e) {
        std::cerr << "hyperzero: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        hz::ResultRecord record = hz::run(config);
        bool pass = record.summary.value("pass", true);

        if (config.kernel_c && record.complete && config.experiment == hz::Experiment::Correlations) {
            auto const report = hz::compare(record, hz::KernelPrediction{*config.kernel_c});
            record.summary["kernel_comparison"] = hz::to_json(report);
            pass = pass && report.pass;
        }
        if (!config.baseline.empty() && record.complete) {
            auto const report = hz::compare(record, hz::read_record(config.baseline));
            record.summary["baseline_comparison"] = hz::to_json(report);
            pass = pass && report.pass;
        }
        record.summary["pass"] = pass;

        if (config.out.empty()) {
            std::cout << hz::to_json(record).dump(2) << '\n';
        } else {
            hz::write_record(config.out, record);
        }
        if (!config.csv.empty()) hz::write_cells_csv(config.csv, record);
        print_summary(record);

        if (!record.complete) {
            std::cerr << "hyperzero: " << record.summary["failure"].value("message", "trial failure") << '\n';
            return kTrialFailure;
        }
        return pass ? kOk : kComparisonFailure;
    } catch (hz::ConfigInvalid const& e) {
        std::cerr << "hyperzero: " << e.what() << '\n';
        return kConfigError;
    } catch (hz::GeometryMismatch const& e) {
        std::cerr << "hyperzero: " << e.what() << '\n';
        return kComparisonFailure;
    } catch (hz::Error const& e) {
        std::cerr << "hyperzero: " << e.what() << '\n';
        return kConfigError;
    }
}

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hyperzero/harness.hpp"

namespace hyperzero {

namespace pt = boost::property_tree;

namespace {

std::string join(std::vector<std::string> const& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

double parse_real(std::string_view text)
{
    std::string const s = boost::algorithm::trim_copy(std::string(text));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (std::exception const&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw PreconditionError("not a number: '" + s + "'");
    return v;
}

std::uint64_t parse_unsigned(std::string_view text)
{
    std::string const s = boost::algorithm::trim_copy(std::string(text));
    std::uint64_t v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw PreconditionError("not a non-negative integer: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_items(std::string const& text, char const* separators)
{
    std::vector<std::string> parts;
    std::string const trimmed = boost::algorithm::trim_copy(text);
    if (trimmed.empty()) return parts;
    boost::algorithm::split(parts, trimmed, boost::algorithm::is_any_of(separators));
    for (auto& p : parts) boost::algorithm::trim(p);
    return parts;
}

std::string format_real(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_complex(Complex z)
{
    if (z.imag() == 0.0) return format_real(z.real());
    return format_real(z.real()) + "," + format_real(z.imag());
}

std::string format_complex_list(std::vector<Complex> const& zs)
{
    std::vector<std::string> parts;
    for (Complex z : zs) parts.push_back(format_complex(z));
    return join(parts, "; ");
}

std::string format_real_list(std::vector<double> const& xs)
{
    std::vector<std::string> parts;
    for (double x : xs) parts.push_back(format_real(x));
    return join(parts, ", ");
}

}  // namespace

ConfigInvalid::ConfigInvalid(std::vector<std::string> problems)
    : Error("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems))
{
}

std::string_view experiment_name(Experiment e)
{
    switch (e) {
    case Experiment::VerifyIdentities: return "verify-identities";
    case Experiment::Clt: return "clt";
    case Experiment::Intensity: return "intensity";
    case Experiment::Correlations: return "correlations";
    case Experiment::Independence: return "independence";
    case Experiment::RootsBench: return "roots-bench";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name)
{
    for (Experiment e : {Experiment::VerifyIdentities, Experiment::Clt, Experiment::Intensity,
                         Experiment::Correlations, Experiment::Independence, Experiment::RootsBench}) {
        if (experiment_name(e) == name) return e;
    }
    throw ConfigInvalid({"experiment: unknown experiment '" + std::string(name) +
                         "' (expected verify-identities|clt|intensity|correlations|independence|roots-bench)"});
}

Complex parse_complex(std::string_view text)
{
    auto const parts = split_items(std::string(text), ",");
    if (parts.size() == 1) return {parse_real(parts[0]), 0.0};
    if (parts.size() == 2) return {parse_real(parts[0]), parse_real(parts[1])};
    throw PreconditionError("not a complex number (expected RE or RE,IM): '" + std::string(text) + "'");
}

bool operator==(ExperimentConfig const& a, ExperimentConfig const& b)
{
    return a.experiment == b.experiment && a.law == b.law && a.sparsity == b.sparsity &&
           a.u_values == b.u_values && a.centers == b.centers && a.epsilons == b.epsilons &&
           a.lambdas == b.lambdas && a.radius == b.radius && a.bins == b.bins && a.trials == b.trials &&
           a.master_seed == b.master_seed && a.threads == b.threads && a.tail_tolerance == b.tail_tolerance &&
           a.safety_factor == b.safety_factor && a.roots.residual_tolerance == b.roots.residual_tolerance &&
           a.roots.max_iterations == b.roots.max_iterations &&
           a.roots.quadrature_nodes == b.roots.quadrature_nodes && a.min_degree == b.min_degree &&
           a.max_degree == b.max_degree && a.out == b.out && a.csv == b.csv && a.kernel_c == b.kernel_c &&
           a.baseline == b.baseline;
}

ExperimentConfig parse_config(std::string const& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (pt::ini_parser_error const& e) {
        throw ConfigInvalid({std::string("syntax: ") + e.what()});
    }

    ExperimentConfig cfg;
    std::vector<std::string> problems;
    auto field = [&](char const* path, auto&& apply) {
        auto const v = tree.get_optional<std::string>(path);
        if (!v) return;
        try {
            apply(boost::algorithm::trim_copy(*v));
        } catch (Error const& e) {
            problems.push_back(std::string(path) + ": " + e.what());
        }
    };
    auto required = [](std::string const& v) -> std::string const& {
        if (v.empty()) throw PreconditionError("empty value");
        return v;
    };

    field("experiment", [&](std::string const& v) {
        try {
            cfg.experiment = parse_experiment(v);
        } catch (ConfigInvalid const& e) {
            throw PreconditionError(e.problems().front());
        }
    });
    field("law.name", [&](std::string const& v) { cfg.law = required(v); });
    field("law.p", [&](std::string const& v) { cfg.sparsity = parse_real(v); });
    field("geometry.u", [&](std::string const& v) {
        for (auto const& item : split_items(v, ";")) cfg.u_values.push_back(parse_complex(item));
    });
    field("geometry.centers", [&](std::string const& v) {
        for (auto const& item : split_items(v, ";")) cfg.centers.push_back(parse_complex(item));
    });
    field("geometry.lambdas", [&](std::string const& v) {
        for (auto const& item : split_items(v, ";")) cfg.lambdas.push_back(parse_complex(item));
    });
    field("geometry.epsilons", [&](std::string const& v) {
        for (auto const& item : split_items(v, ",;")) cfg.epsilons.push_back(parse_real(item));
    });
    field("geometry.radius", [&](std::string const& v) { cfg.radius = parse_real(required(v)); });
    field("geometry.bins", [&](std::string const& v) { cfg.bins = parse_unsigned(required(v)); });
    field("run.trials", [&](std::string const& v) { cfg.trials = parse_unsigned(required(v)); });
    field("run.seed", [&](std::string const& v) { cfg.master_seed = parse_unsigned(required(v)); });
    field("run.threads", [&](std::string const& v) { cfg.threads = static_cast<unsigned>(parse_unsigned(v)); });
    field("run.out", [&](std::string const& v) { cfg.out = v; });
    field("run.csv", [&](std::string const& v) { cfg.csv = v; });
    field("truncation.tail_tolerance", [&](std::string const& v) { cfg.tail_tolerance = parse_real(v); });
    field("truncation.safety_factor", [&](std::string const& v) { cfg.safety_factor = parse_real(v); });
    field("roots.residual_tolerance", [&](std::string const& v) { cfg.roots.residual_tolerance = parse_real(v); });
    field("roots.max_iterations",
          [&](std::string const& v) { cfg.roots.max_iterations = static_cast<int>(parse_unsigned(v)); });
    field("roots.quadrature_nodes",
          [&](std::string const& v) { cfg.roots.quadrature_nodes = static_cast<int>(parse_unsigned(v)); });
    field("roots.min_degree", [&](std::string const& v) { cfg.min_degree = parse_unsigned(v); });
    field("roots.max_degree", [&](std::string const& v) { cfg.max_degree = parse_unsigned(v); });
    field("compare.kernel_c", [&](std::string const& v) {
        if (!v.empty()) cfg.kernel_c = parse_real(v);
    });
    field("compare.baseline", [&](std::string const& v) { cfg.baseline = v; });

    if (!problems.empty()) throw ConfigInvalid(problems);
    return cfg;
}

ExperimentConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigInvalid({"config: cannot open '" + path.string() + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(ExperimentConfig const& c)
{
    pt::ptree tree;
    tree.put("experiment", std::string(experiment_name(c.experiment)));
    tree.put("law.name", c.law);
    tree.put("law.p", format_real(c.sparsity));
    if (!c.u_values.empty()) tree.put("geometry.u", format_complex_list(c.u_values));
    if (!c.centers.empty()) tree.put("geometry.centers", format_complex_list(c.centers));
    if (!c.lambdas.empty()) tree.put("geometry.lambdas", format_complex_list(c.lambdas));
    if (!c.epsilons.empty()) tree.put("geometry.epsilons", format_real_list(c.epsilons));
    if (c.radius) tree.put("geometry.radius", format_real(*c.radius));
    if (c.bins) tree.put("geometry.bins", *c.bins);
    if (c.trials) tree.put("run.trials", *c.trials);
    tree.put("run.seed", c.master_seed);
    tree.put("run.threads", c.threads);
    if (!c.out.empty()) tree.put("run.out", c.out);
    if (!c.csv.empty()) tree.put("run.csv", c.csv);
    tree.put("truncation.tail_tolerance", format_real(c.tail_tolerance));
    tree.put("truncation.safety_factor", format_real(c.safety_factor));
    tree.put("roots.residual_tolerance", format_real(c.roots.residual_tolerance));
    tree.put("roots.max_iterations", c.roots.max_iterations);
    tree.put("roots.quadrature_nodes", c.roots.quadrature_nodes);
    tree.put("roots.min_degree", c.min_degree);
    tree.put("roots.max_degree", c.max_degree);
    if (c.kernel_c) tree.put("compare.kernel_c", format_real(*c.kernel_c));
    if (!c.baseline.empty()) tree.put("compare.baseline", c.baseline);
    std::ostringstream out;
    pt::write_ini(out, tree);
    return out.str();
}

ExperimentConfig with_defaults(ExperimentConfig c)
{
    switch (c.experiment) {
    case Experiment::VerifyIdentities:
        break;
    case Experiment::Clt:
        if (c.u_values.empty()) c.u_values = {0.0};
        if (c.centers.empty()) c.centers = {{0.3, 0.0}, {-0.2, 0.4}};
        if (c.lambdas.empty()) c.lambdas.assign(c.centers.size(), Complex{1.0, 0.0});
        break;
    case Experiment::Intensity:
        if (c.u_values.empty()) c.u_values = {0.0};
        if (!c.radius) c.radius = 0.5;
        if (!c.bins) c.bins = 5;
        break;
    case Experiment::Correlations:
        if (c.u_values.empty()) c.u_values = {0.0};
        if (c.centers.empty()) c.centers = {0.0};
        if (c.epsilons.empty()) c.epsilons = {0.2, 0.1, 0.05};
        break;
    case Experiment::Independence:
        if (c.u_values.empty()) c.u_values = {0.9, -0.9};
        if (c.centers.empty()) c.centers = {0.0};
        if (c.epsilons.empty()) c.epsilons = {0.2};
        break;
    case Experiment::RootsBench:
        if (!c.radius) c.radius = 0.6;
        break;
    }
    return c;
}

void validate(ExperimentConfig const& c)
{
    std::vector<std::string> problems;
    auto check = [&](bool ok, std::string msg) {
        if (!ok) problems.push_back(std::move(msg));
    };
    bool const needs_trials = c.experiment != Experiment::VerifyIdentities;

    try {
        (void)CoefficientLaw::from_name(c.law, c.sparsity);
    } catch (Error const& e) {
        problems.push_back(std::string("law: ") + e.what());
    }
    for (std::size_t i = 0; i < c.u_values.size(); ++i) {
        check(std::abs(c.u_values[i]) < 1.0, "u[" + std::to_string(i) + "]: must satisfy |u| < 1");
    }
    for (std::size_t i = 0; i < c.centers.size(); ++i) {
        check(std::abs(c.centers[i]) < 1.0, "centers[" + std::to_string(i) + "]: must satisfy |z| < 1");
    }
    for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
        check(c.epsilons[i] > 0.0, "epsilons[" + std::to_string(i) + "]: must be positive");
    }
    if (needs_trials) {
        check(c.trials.has_value(), "trials: required for " + std::string(experiment_name(c.experiment)));
        check(!c.trials || *c.trials > 0, "trials: must be positive");
    }
    check(c.tail_tolerance > 0.0, "tail_tolerance: must be positive");
    check(c.safety_factor >= 1.0, "safety_factor: must be at least 1");
    check(c.roots.residual_tolerance > 0.0, "residual_tolerance: must be positive");
    check(c.roots.max_iterations > 0, "max_iterations: must be positive");
    check(c.roots.quadrature_nodes >= 8, "quadrature_nodes: must be at least 8");
    check(!c.kernel_c || *c.kernel_c > 0.0, "kernel_c: must be positive");

    switch (c.experiment) {
    case Experiment::VerifyIdentities:
        break;
    case Experiment::Clt:
        check(c.u_values.size() == 1, "u: clt takes exactly one u");
        check(!c.centers.empty(), "centers: clt needs at least one point");
        check(c.lambdas.size() == c.centers.size(), "lambdas: need one lambda per point");
        check(!c.trials || *c.trials >= 1000, "trials: clt needs at least 1000 samples");
        break;
    case Experiment::Intensity:
        check(c.u_values.size() == 1, "u: intensity takes exactly one u");
        check(c.radius && *c.radius > 0.0 && *c.radius < 1.0, "radius: must lie in (0, 1)");
        check(c.bins && *c.bins > 0, "bins: must be positive");
        break;
    case Experiment::Correlations: {
        check(!c.u_values.empty(), "u: need at least one u");
        for (std::size_t i = 1; i < c.u_values.size(); ++i) {
            check(std::abs(c.u_values[i]) > std::abs(c.u_values[i - 1]), "u: |u| must be strictly increasing");
        }
        check(!c.centers.empty() && c.centers.size() <= 4, "centers: need between 1 and 4 centers");
        check(!c.epsilons.empty(), "epsilons: need at least one epsilon");
        for (std::size_t i = 1; i < c.epsilons.size(); ++i) {
            check(c.epsilons[i] < c.epsilons[i - 1], "epsilons: must be strictly decreasing");
        }
        bool const points_ok = std::all_of(c.centers.begin(), c.centers.end(),
                                           [](Complex z) { return std::abs(z) < 1.0; });
        if (points_ok) {
            std::vector<DiskPoint> pts(c.centers.begin(), c.centers.end());
            for (double eps : c.epsilons) {
                try {
                    BallFamily const family(pts, eps);
                } catch (Error const& e) {
                    problems.push_back("epsilons: " + std::string(e.what()));
                }
            }
        }
        break;
    }
    case Experiment::Independence:
        check(c.u_values.size() == 2, "u: independence takes exactly two u values");
        check(c.centers.size() == 1, "centers: independence takes exactly one center");
        check(c.epsilons.size() == 1, "epsilons: independence takes exactly one epsilon");
        if (c.centers.size() == 1 && c.epsilons.size() == 1 && std::abs(c.centers[0]) < 1.0) {
            check(std::abs(c.centers[0]) + c.epsilons[0] < 1.0, "epsilons: ball leaves the unit disk");
        }
        break;
    case Experiment::RootsBench:
        check(c.min_degree >= 1 && c.min_degree <= c.max_degree, "min_degree/max_degree: need 1 <= min <= max");
        check(c.radius && *c.radius > 0.0 && *c.radius < 1.0, "radius: must lie in (0, 1)");
        break;
    }
    if (!problems.empty()) throw ConfigInvalid(problems);
}

nlohmann::json config_to_json(ExperimentConfig const& c)
{
    auto complex_list = [](std::vector<Complex> const& zs) {
        nlohmann::json arr = nlohmann::json::array();
        for (Complex z : zs) arr.push_back({z.real(), z.imag()});
        return arr;
    };
    nlohmann::json j;
    j["experiment"] = experiment_name(c.experiment);
    j["law"] = {{"name", c.law}, {"p", c.sparsity}};
    j["u"] = complex_list(c.u_values);
    j["centers"] = complex_list(c.centers);
    j["lambdas"] = complex_list(c.lambdas);
    j["epsilons"] = c.epsilons;
    j["radius"] = c.radius ? nlohmann::json(*c.radius) : nlohmann::json(nullptr);
    j["bins"] = c.bins ? nlohmann::json(*c.bins) : nlohmann::json(nullptr);
    j["trials"] = c.trials ? nlohmann::json(*c.trials) : nlohmann::json(nullptr);
    j["master_seed"] = c.master_seed;
    j["truncation"] = {{"tail_tolerance", c.tail_tolerance}, {"safety_factor", c.safety_factor}};
    j["roots"] = {{"residual_tolerance", c.roots.residual_tolerance},
                  {"max_iterations", c.roots.max_iterations},
                  {"quadrature_nodes", c.roots.quadrature_nodes},
                  {"min_degree", c.min_degree},
                  {"max_degree", c.max_degree}};
    if (c.kernel_c) j["kernel_c"] = *c.kernel_c;
    return j;
}

}  // namespace hyperzero

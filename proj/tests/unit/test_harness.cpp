#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hyperzero/harness.hpp"

using namespace hyperzero;

namespace {

char const* const kIntensityText = R"(experiment = intensity

[law]
name = gaussian

[geometry]
u = 0
radius = 0.5
bins = 4

[run]
trials = 2000
seed = 42
)";

std::filesystem::path temp_path(std::string const& name)
{
    return std::filesystem::temp_directory_path() / ("hyperzero_test_" + name);
}

}  // namespace

TEST_CASE("config parsing")
{
    ExperimentConfig const c = parse_config(kIntensityText);
    CHECK(c.experiment == Experiment::Intensity);
    CHECK(c.law == "gaussian");
    CHECK(c.u_values == std::vector<Complex>{0.0});
    CHECK(c.radius == 0.5);
    CHECK(c.bins == 4u);
    CHECK(c.trials == 2000u);
    CHECK(c.master_seed == 42u);

    ExperimentConfig const d = parse_config(R"(experiment = correlations
[geometry]
u = 0.5; 0.9,0.05
centers = -0.4 ; 0.4,0
epsilons = 0.2, 0.1
[law]
name = sparse
p = 0.25
[run]
trials = 10
)");
    CHECK(d.u_values == std::vector<Complex>{{0.5, 0.0}, {0.9, 0.05}});
    CHECK(d.centers == std::vector<Complex>{{-0.4, 0.0}, {0.4, 0.0}});
    CHECK(d.epsilons == std::vector<double>{0.2, 0.1});
    CHECK(d.sparsity == 0.25);
}

TEST_CASE("config round trip is idempotent")
{
    ExperimentConfig c = parse_config(kIntensityText);
    c.centers = {{0.1, -0.2}, {0.3, 0.0}};
    c.epsilons = {0.2, 0.1, 0.05};
    c.lambdas = {{1.0, 0.0}, {0.0, 1.0}};
    c.kernel_c = 1.0 / 3.0;
    c.tail_tolerance = 1e-11;
    c.roots.quadrature_nodes = 128;
    c.out = "out.json";
    std::string const text = serialize_config(c);
    ExperimentConfig const back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("invalid configs name their fields")
{
    auto problems_of = [](std::string const& text) {
        try {
            validate(with_defaults(parse_config(text)));
        } catch (ConfigInvalid const& e) {
            return e.problems();
        }
        return std::vector<std::string>{};
    };
    // An empty trials field.
    CHECK_THROWS_AS(parse_config("experiment = intensity\n[run]\ntrials =\n"), ConfigInvalid);
    // A missing one.
    auto const missing = problems_of("experiment = intensity\n");
    REQUIRE(missing.size() == 1);
    CHECK(missing[0].rfind("trials", 0) == 0);

    auto const many = problems_of("experiment = correlations\n[geometry]\nu = 1.2\nepsilons = 0.1, 0.2\n"
                                  "[law]\nname = cauchy\n[run]\ntrials = 5\n");
    CHECK(many.size() >= 3);
    CHECK_THROWS_AS(parse_config("experiment = nonsense\n"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config("experiment = clt\n[geometry]\nu = x\n"), ConfigInvalid);
    CHECK_THROWS_AS(run(parse_config("experiment = intensity\n")), ConfigInvalid);
    CHECK_THROWS_AS(load_config(temp_path("does_not_exist.ini")), ConfigInvalid);
    CHECK(parse_complex("0.25, -1") == Complex{0.25, -1.0});
    CHECK_THROWS_AS(parse_complex("1,2,3"), PreconditionError);
}

TEST_CASE("runs are reproducible bit for bit")
{
    ExperimentConfig c = parse_config(kIntensityText);
    c.threads = 1;
    ResultRecord const a = run(c);
    c.threads = 3;
    ResultRecord const b = run(c);
    REQUIRE(a.complete);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].name == b.cells[i].name);
        CHECK(a.cells[i].value == b.cells[i].value);
        CHECK(a.cells[i].std_error == b.cells[i].std_error);
    }
    Cell const* total = a.find("total_count");
    REQUIRE(total);
    CHECK(total->prediction == doctest::Approx(1.0 / 3.0));
    CHECK(*total->deviation_sigma <= kPassSigma);
    CHECK(a.summary["pass"] == true);
}

TEST_CASE("records survive JSON and CSV output")
{
    ResultRecord const r = run(parse_config(kIntensityText));
    auto const json_path = temp_path("record.json");
    write_record(json_path, r);
    ResultRecord const back = read_record(json_path);
    CHECK(back.experiment == r.experiment);
    CHECK(back.config == r.config);
    REQUIRE(back.cells.size() == r.cells.size());
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        CHECK(back.cells[i].value == r.cells[i].value);
        CHECK(back.cells[i].prediction == r.cells[i].prediction);
    }
    nlohmann::json const j = to_json(r);
    for (char const* key : {"experiment", "config", "cells", "summary", "meta"}) CHECK(j.contains(key));
    CHECK(j["meta"].contains("wall_clock_seconds"));
    CHECK(j["meta"]["master_seed"] == 42);

    auto const csv_path = temp_path("cells.csv");
    write_cells_csv(csv_path, r);
    std::ifstream in(csv_path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == r.cells.size() + 1);
    std::filesystem::remove(json_path);
    std::filesystem::remove(csv_path);
}

TEST_CASE("comparisons")
{
    ResultRecord const r = run(parse_config(kIntensityText));
    ComparisonReport const self = compare(r, r);
    CHECK(self.pass);
    CHECK_FALSE(self.entries.empty());
    for (auto const& e : self.entries) CHECK(e.deviation_sigma == 0.0);

    ExperimentConfig other = parse_config(kIntensityText);
    other.radius = 0.4;
    CHECK_THROWS_AS(compare(r, run(other)), GeometryMismatch);
    CHECK_THROWS_AS(compare(r, KernelPrediction{1.0}), GeometryMismatch);
    CHECK(deviation_in_sigma(1.0, 1.0, 0.0) == 0.0);
    CHECK(deviation_in_sigma(1.0, 2.0, 0.5) == 2.0);

    ExperimentConfig corr = parse_config(R"(experiment = correlations
[geometry]
u = 0
centers = 0
epsilons = 0.3, 0.2
[run]
trials = 1500
seed = 3
[compare]
kernel_c = 1
)");
    ResultRecord const cr = run(corr);
    Cell const* limit = cr.find("limit");
    REQUIRE(limit);
    ComparisonReport const k = compare(cr, KernelPrediction{1.0});
    REQUIRE(k.entries.size() == 1);
    CHECK(k.entries[0].prediction == doctest::Approx(1.0));
    CHECK(k.entries[0].deviation_sigma == doctest::Approx(*limit->deviation_sigma));
}

TEST_CASE("verify-identities passes every check")
{
    ResultRecord const r = run(parse_config("experiment = verify-identities\n"));
    CHECK(r.cells.size() == 7);
    for (Cell const& c : r.cells) {
        INFO(c.name << " = " << c.value);
        CHECK(c.pass == true);
    }
    CHECK(r.summary["pass"] == true);
}

TEST_CASE("a trial failure yields an incomplete record")
{
    ExperimentConfig c = parse_config("experiment = roots-bench\n[run]\ntrials = 5\n");
    c.roots.max_iterations = 1;
    ResultRecord const r = run(c);
    CHECK_FALSE(r.complete);
    CHECK(r.summary["pass"] == false);
    CHECK(r.summary["failure"].contains("stream_index"));
    CHECK(r.summary["failure"]["master_seed"] == 1);
}

TEST_CASE("shipped configs are valid")
{
    std::size_t seen = 0;
    for (auto const& entry : std::filesystem::directory_iterator(HYPERZERO_CONFIG_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        INFO(entry.path());
        ExperimentConfig const c = load_config(entry.path());
        CHECK_NOTHROW(validate(with_defaults(c)));
        CHECK(parse_config(serialize_config(c)) == c);
        ++seen;
    }
    CHECK(seen >= 5);
}

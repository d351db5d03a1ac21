#include <fstream>
#include <iomanip>
#include <limits>

#include "hyperzero/harness.hpp"

namespace hyperzero {

namespace {

// JSON has no infinity; non-finite numbers round-trip as null.
nlohmann::json number(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_from(nlohmann::json const& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string csv_quote(std::string const& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

nlohmann::json to_json(ResultRecord const& record)
{
    nlohmann::json cells = nlohmann::json::array();
    for (Cell const& c : record.cells) {
        nlohmann::json j = {{"name", c.name},         {"key", c.key},
                            {"value", number(c.value)}, {"std_error", number(c.std_error)},
                            {"trials", c.trials},     {"hits", c.hits},
                            {"statistical", c.statistical}};
        if (c.prediction) j["prediction"] = number(*c.prediction);
        if (c.deviation_sigma) j["deviation_sigma"] = number(*c.deviation_sigma);
        if (c.pass) j["pass"] = *c.pass;
        cells.push_back(std::move(j));
    }
    nlohmann::json summary = record.summary;
    summary["complete"] = record.complete;
    return {{"experiment", record.experiment},
            {"config", record.config},
            {"cells", cells},
            {"summary", summary},
            {"meta", record.meta}};
}

ResultRecord record_from_json(nlohmann::json const& j)
{
    ResultRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.config = j.at("config");
    r.summary = j.at("summary");
    r.meta = j.value("meta", nlohmann::json::object());
    r.complete = r.summary.value("complete", true);
    for (auto const& cj : j.at("cells")) {
        Cell c;
        c.name = cj.at("name").get<std::string>();
        c.key = cj.value("key", nlohmann::json::object());
        c.value = number_from(cj.at("value"));
        c.std_error = number_from(cj.at("std_error"));
        c.trials = cj.value("trials", std::size_t{0});
        c.hits = cj.value("hits", std::size_t{0});
        c.statistical = cj.value("statistical", false);
        if (cj.contains("prediction")) c.prediction = number_from(cj["prediction"]);
        if (cj.contains("deviation_sigma")) c.deviation_sigma = number_from(cj["deviation_sigma"]);
        if (cj.contains("pass")) c.pass = cj["pass"].get<bool>();
        r.cells.push_back(std::move(c));
    }
    return r;
}

void write_record(std::filesystem::path const& path, ResultRecord const& record)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << std::setw(2) << to_json(record) << '\n';
}

ResultRecord read_record(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    try {
        return record_from_json(nlohmann::json::parse(in));
    } catch (nlohmann::json::exception const& e) {
        throw Error("malformed record '" + path.string() + "': " + e.what());
    }
}

void write_cells_csv(std::filesystem::path const& path, ResultRecord const& record)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    out << "experiment,cell,value,std_error,trials,hits,prediction,deviation_sigma,pass,key\n";
    for (Cell const& c : record.cells) {
        out << record.experiment << ',' << c.name << ',' << c.value << ',' << c.std_error << ',' << c.trials << ','
            << c.hits << ',';
        if (c.prediction) out << *c.prediction;
        out << ',';
        if (c.deviation_sigma) out << *c.deviation_sigma;
        out << ',';
        if (c.pass) out << (*c.pass ? "true" : "false");
        out << ',' << csv_quote(c.key.dump()) << '\n';
    }
}

}  // namespace hyperzero

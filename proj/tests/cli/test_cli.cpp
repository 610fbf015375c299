#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SYNTHCTL_CLI_PATH;
const fs::path kSource = SYNTHCTL_SOURCE_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("synthctl_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd = kCli + " " + args + " > " + stdout_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Validator for the JSON-schema subset the shipped schemas use: type,
// required, properties, items.
bool matches_schema(const json& value, const json& schema, std::string& why,
                    const std::string& at = "$") {
    if (schema.contains("type")) {
        const std::string type = schema["type"];
        const bool ok = (type == "object" && value.is_object()) ||
                        (type == "array" && value.is_array()) ||
                        (type == "string" && value.is_string()) ||
                        (type == "boolean" && value.is_boolean()) ||
                        (type == "integer" && value.is_number_integer()) ||
                        (type == "number" && value.is_number());
        if (!ok) {
            why = at + ": expected " + type;
            return false;
        }
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
            if (!value.contains(key.get<std::string>())) {
                why = at + ": missing required key " + key.get<std::string>();
                return false;
            }
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (!value.contains(key)) continue;
            if (!matches_schema(value[key], sub, why, at + "." + key)) return false;
        }
    }
    if (schema.contains("items") && value.is_array()) {
        for (size_t i = 0; i < value.size(); ++i) {
            if (!matches_schema(value[i], schema["items"], why,
                                at + "[" + std::to_string(i) + "]"))
                return false;
        }
    }
    return true;
}

void check_schema(const std::string& json_path, const std::string& schema_name) {
    json value = json::parse(slurp(json_path));
    json schema = json::parse(slurp((kSource / "schemas" / schema_name).string()));
    std::string why;
    const bool ok = matches_schema(value, schema, why);
    INFO(why);
    CHECK(ok);
}

void write_figure_fixture(const TempDir& dir) {
    write_file(dir.file("y.csv"),
               "unit,t1,t2\nA,3,3\nB,3.6,3.6\nC,4.2,4.2\n");
    write_file(dir.file("x.csv"), "unit,x\nA,5\nB,6\nC,7\n");
}

}  // namespace

TEST_CASE("estimate writes weights, plot csv, and schema-valid json") {
    TempDir dir;
    write_figure_fixture(dir);
    const std::string out = dir.file("est");
    const int code = run_cli("estimate --data " + dir.file("y.csv") + " --predictors " +
                             dir.file("x.csv") +
                             " --treated A --t0 1 --method nsc --a-star 0 --b-star 0 "
                             "--out " + out,
                             dir.file("stdout.txt"));
    REQUIRE(code == 0);

    json result = json::parse(slurp(out + ".json"));
    CHECK(result["weights"][0]["weight"].get<double>() == doctest::Approx(2.0));
    CHECK(result["weights"][1]["weight"].get<double>() == doctest::Approx(-1.0));
    check_schema(out + ".json", "estimate_result.schema.json");

    const std::string plot = slurp(out + ".csv");
    CHECK(plot.rfind("period,treated,synthetic,gap,ci_lo,ci_hi\n", 0) == 0);

    const std::string summary = slurp(dir.file("stdout.txt"));
    CHECK(summary.rfind("estimate method=nsc", 0) == 0);
}

TEST_CASE("estimate with osc keeps the weights on the simplex") {
    TempDir dir;
    write_figure_fixture(dir);
    const std::string out = dir.file("osc");
    REQUIRE(run_cli("estimate --data " + dir.file("y.csv") + " --predictors " +
                    dir.file("x.csv") +
                    " --treated A --t0 1 --method osc --a-star 0 --b-star 0 --out " +
                    out) == 0);
    json result = json::parse(slurp(out + ".json"));
    double sum = 0.0;
    for (const auto& entry : result["weights"]) {
        const double w = entry["weight"].get<double>();
        CHECK(w >= -1e-10);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("estimate with auto tuning records the search") {
    TempDir dir;
    // A noisy panel with enough donors for donor cross-validation.
    std::ostringstream y;
    y << "unit,t1,t2,t3,t4,t5,t6\n";
    y << "T,1.0,1.1,1.2,1.3,2.5,2.6\n";
    y << "B,1.1,1.2,1.25,1.4,1.5,1.55\n";
    y << "C,0.9,1.0,1.15,1.2,1.3,1.35\n";
    y << "D,1.05,1.05,1.2,1.35,1.4,1.5\n";
    y << "E,0.8,0.9,1.0,1.1,1.2,1.3\n";
    write_file(dir.file("y.csv"), y.str());
    const std::string out = dir.file("auto");
    REQUIRE(run_cli("estimate --data " + dir.file("y.csv") +
                    " --treated T --t0 4 --method nsc --out " + out) == 0);
    json result = json::parse(slurp(out + ".json"));
    CHECK(result["tuning"].contains("cv_converged"));
    const double a_star = result["tuning"]["a_star"].get<double>();
    const double b_star = result["tuning"]["b_star"].get<double>();
    CHECK(a_star >= 0.0);
    CHECK(a_star <= 1.0);
    CHECK(b_star >= 0.0);
    CHECK(b_star <= 1.0);
    check_schema(out + ".json", "estimate_result.schema.json");
}

TEST_CASE("placebo emits one row per unit and a p-value") {
    TempDir dir;
    std::ostringstream y;
    y << "unit,t1,t2,t3,t4,t5,t6\n";
    y << "T,1.0,1.1,1.2,1.3,9.5,9.6\n";
    y << "B,1.1,1.2,1.25,1.4,1.5,1.55\n";
    y << "C,0.9,1.0,1.15,1.2,1.3,1.35\n";
    y << "D,1.05,1.05,1.2,1.35,1.4,1.5\n";
    write_file(dir.file("y.csv"), y.str());
    const std::string out = dir.file("plc");
    REQUIRE(run_cli("placebo --data " + dir.file("y.csv") +
                    " --treated T --t0 4 --method nsc --a-star 0.2 --b-star 0.2 "
                    "--tuning-policy reuse --out " + out) == 0);

    const std::string table = slurp(out + ".csv");
    CHECK(table.rfind("unit,pre_rmspe,post_rmspe,ratio\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);  // header + 4 units

    json result = json::parse(slurp(out + ".json"));
    CHECK(result["p_value"].get<double>() == doctest::Approx(0.25));  // strongest of 4
    check_schema(out + ".json", "placebo_result.schema.json");
}

TEST_CASE("hull prints the verdict and writes a certificate") {
    TempDir dir;
    write_file(dir.file("y.csv"), "unit,t1,t2\nA,5,5\nB,6,6\nC,7,7\n");
    const std::string out = dir.file("hull");
    REQUIRE(run_cli("hull --data " + dir.file("y.csv") + " --treated A --t0 1 --out " + out,
                    dir.file("stdout.txt")) == 0);
    CHECK(slurp(dir.file("stdout.txt")).rfind("outside", 0) == 0);
    check_schema(out + ".json", "hull_result.schema.json");

    write_file(dir.file("y2.csv"), "unit,t1,t2\nA,5,5\nD,2,2\nB,6,6\n");
    REQUIRE(run_cli("hull --data " + dir.file("y2.csv") + " --treated A --t0 1 --out " +
                    out, dir.file("stdout2.txt")) == 0);
    CHECK(slurp(dir.file("stdout2.txt")).rfind("inside", 0) == 0);
    json cert = json::parse(slurp(out + ".json"));
    CHECK(cert["weights"][0]["weight"].get<double>() == doctest::Approx(0.25));
    CHECK(cert["weights"][1]["weight"].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("hull experiment mode emits the summary csv") {
    TempDir dir;
    const std::string out = dir.file("hx");
    REQUIRE(run_cli("hull --experiment --samples 4 --max-controls 128 --t0-list 1,2 "
                    "--seed 3 --out " + out) == 0);
    const std::string csv = slurp(out + ".csv");
    CHECK(csv.rfind("t0,median_min_controls,censored_fraction\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("simulate emits a table row per setting and method, deterministically") {
    TempDir dir;
    const std::string args = "simulate --settings 6,5,1 --scale desk --seed 42 --out ";
    REQUIRE(run_cli(args + dir.file("a.csv")) == 0);
    REQUIRE(run_cli(args + dir.file("b.csv")) == 0);
    const std::string a = slurp(dir.file("a.csv"));
    CHECK(a == slurp(dir.file("b.csv")));
    CHECK(a.rfind("J,T0,r,method,bias,sd,coverage\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 5);
    CHECK(a.find("6,5,1,osc,") != std::string::npos);
    CHECK(a.find("6,5,1,nsc,") != std::string::npos);

    REQUIRE(run_cli("simulate --settings 6,5,9 --scale desk --out " + dir.file("bad.csv")) == 2);
}

TEST_CASE("robust backdate stays quiet on a null panel") {
    TempDir dir;
    std::ostringstream y;
    y << "unit,t1,t2,t3,t4,t5,t6,t7,t8\n";
    // Treated is an exact average of B and C everywhere; no treatment effect.
    y << "T,1.0,1.5,1.25,1.4,1.3,1.45,1.35,1.5\n";
    y << "B,0.8,1.3,1.05,1.2,1.1,1.25,1.15,1.3\n";
    y << "C,1.2,1.7,1.45,1.6,1.5,1.65,1.55,1.7\n";
    y << "D,2.0,2.5,2.25,2.4,2.3,2.45,2.35,2.5\n";
    write_file(dir.file("y.csv"), y.str());
    const std::string out = dir.file("bd");
    REQUIRE(run_cli("robust --data " + dir.file("y.csv") +
                    " --treated T --t0 6 --method nsc --a-star 0 --b-star 0 "
                    "--mode backdate --new-t0 4 --out " + out) == 0);
    check_schema(out + ".json", "robust_result.schema.json");
    json result = json::parse(slurp(out + ".json"));
    CHECK(result["new_t0"].get<int>() == 4);

    // Every gap in the placebo window (periods 5..6) stays near zero.
    std::istringstream plot(slurp(out + ".csv"));
    std::string line;
    std::getline(plot, line);  // header
    int idx = 0;
    while (std::getline(plot, line)) {
        const auto first = line.find(',');
        const auto gap_start = line.find(',', line.find(',', first + 1) + 1) + 1;
        const double gap = std::stod(line.substr(gap_start));
        if (idx < 6) CHECK(std::abs(gap) < 1e-8);
        ++idx;
    }
    CHECK(idx == 8);
}

TEST_CASE("backdating a treated panel diverges only after the real treatment") {
    TempDir dir;
    std::ostringstream y;
    y << "unit,t1,t2,t3,t4,t5,t6,t7,t8\n";
    // Treated tracks the average of B and C until the real treatment at
    // period 7, then jumps.
    y << "T,1.0,1.5,1.25,1.4,1.3,1.45,3.35,3.5\n";
    y << "B,0.8,1.3,1.05,1.2,1.1,1.25,1.15,1.3\n";
    y << "C,1.2,1.7,1.45,1.6,1.5,1.65,1.55,1.7\n";
    y << "D,2.0,2.5,2.25,2.4,2.3,2.45,2.35,2.5\n";
    write_file(dir.file("y.csv"), y.str());
    const std::string out = dir.file("bd2");
    REQUIRE(run_cli("robust --data " + dir.file("y.csv") +
                    " --treated T --t0 6 --method nsc --a-star 0 --b-star 0 "
                    "--mode backdate --new-t0 4 --out " + out) == 0);
    std::istringstream plot(slurp(out + ".csv"));
    std::string line;
    std::getline(plot, line);
    int idx = 0;
    while (std::getline(plot, line)) {
        const auto first = line.find(',');
        const auto gap_start = line.find(',', line.find(',', first + 1) + 1) + 1;
        const double gap = std::stod(line.substr(gap_start));
        if (idx < 6) CHECK(std::abs(gap) < 1e-8);  // placebo window stays flat
        else CHECK(gap > 1.0);                     // real treatment shows up
        ++idx;
    }
}

TEST_CASE("robust loo writes one series per donor") {
    TempDir dir;
    write_file(dir.file("y.csv"),
               "unit,t1,t2,t3\nT,1,2,3\nB,1.1,2.1,3.1\nC,0.9,1.9,2.9\nD,1.2,2.2,3.0\n");
    const std::string out = dir.file("loo");
    REQUIRE(run_cli("robust --data " + dir.file("y.csv") +
                    " --treated T --t0 2 --method esc --a-star 0 --b-star 0 "
                    "--mode loo --out " + out) == 0);
    const std::string csv = slurp(out + ".csv");
    CHECK(csv.rfind("excluded_unit,period,gap\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 3 donors x 3 periods
    json result = json::parse(slurp(out + ".json"));
    CHECK(result["n_series"].get<int>() == 3);
}

TEST_CASE("config file supplies defaults and explicit flags win") {
    TempDir dir;
    write_figure_fixture(dir);
    write_file(dir.file("cfg.json"),
               std::string("{\"data\": \"") + dir.file("y.csv") +
                   "\", \"predictors\": \"" + dir.file("x.csv") +
                   "\", \"treated\": \"A\", \"t0\": \"1\", \"method\": \"osc\", "
                   "\"a-star\": \"0\", \"b-star\": \"0\", \"out\": \"" +
                   dir.file("cfg_out") + "\"}");
    REQUIRE(run_cli("estimate --config " + dir.file("cfg.json")) == 0);
    json from_config = json::parse(slurp(dir.file("cfg_out") + ".json"));
    CHECK(from_config["method"] == "osc");

    // The explicit flag overrides the config value.
    REQUIRE(run_cli("estimate --config " + dir.file("cfg.json") + " --method nsc") == 0);
    json overridden = json::parse(slurp(dir.file("cfg_out") + ".json"));
    CHECK(overridden["method"] == "nsc");
}

TEST_CASE("exit codes distinguish validation, solver, and io failures") {
    TempDir dir;
    write_figure_fixture(dir);
    CHECK(run_cli("estimate --data " + dir.file("nope.csv") +
                  " --treated A --t0 1 --a-star 0 --b-star 0") == 4);
    CHECK(run_cli("estimate --data " + dir.file("y.csv") +
                  " --treated NOPE --t0 1 --a-star 0 --b-star 0") == 2);
    CHECK(run_cli("estimate --data " + dir.file("y.csv") +
                  " --treated A --t0 1 --method osc --a-star 0.5 --b-star 0") == 2);
    CHECK(run_cli("estimate") == 2);
    CHECK(run_cli("nonsense") == 2);
}

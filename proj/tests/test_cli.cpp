#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string file_content;
};

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "specgap-cli-tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& out_name) {
    const fs::path out = temp_dir() / out_name;
    std::error_code ec;
    fs::remove(out, ec);
    const std::string cmd = std::string(SPECGAP_CLI_PATH) + " " + args + " --out " +
                            out.string() + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(raw);
    if (fs::exists(out)) {
        std::ifstream in(out, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        r.file_content = ss.str();
    }
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line.rfind("# ", 0) == 0) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

TEST_CASE("curves emits the corner row first") {
    const auto r = run_cli("curves --rect 0,1,-1,1 --samples 5", "curves.csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.file_content);
    REQUIRE(rows.size() == 6);  // header + 5 samples
    CHECK(rows[0] == std::vector<std::string>{"t", "lower_re", "lower_im", "upper_re",
                                              "upper_im"});
    CHECK(rows[1][0] == "0");
    CHECK(std::stod(rows[1][1]) == 0.0);
    CHECK(std::stod(rows[1][2]) == -1.0);
    CHECK(std::stod(rows[1][3]) == 0.0);
    CHECK(std::stod(rows[1][4]) == 1.0);
}

TEST_CASE("curves middle row matches the wide-case formula") {
    const auto r = run_cli("curves --rect 0,1,-0.25,0.25 --samples 3", "curves_wide.csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.file_content);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[2][0]) == 0.5);
    CHECK_THAT(std::stod(rows[2][1]),
               Catch::Matchers::WithinAbs(0.0669872981077807, 1e-12));
}

TEST_CASE("the t column round-trips bit-exactly") {
    const auto r = run_cli("curves --rect 0,1,-1,1 --samples 7", "curves_rt.csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.file_content);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = double(i - 1) / 6.0;
        REQUIRE(std::stod(rows[i][0]) == t);
    }
}

TEST_CASE("identical configs produce byte-identical files") {
    const auto a = run_cli("curves --rect 0,1,-0.5,0.5 --samples 33 --seed 7", "rerun_a.csv");
    const auto b = run_cli("curves --rect 0,1,-0.5,0.5 --samples 33 --seed 7", "rerun_b.csv");
    REQUIRE(a.exit_code == 0);
    REQUIRE(!a.file_content.empty());
    REQUIRE(a.file_content == b.file_content);

    const auto c = run_cli("random-check --trials 5 --seed 11", "rerun_c.json");
    const auto d = run_cli("random-check --trials 5 --seed 11", "rerun_d.json");
    REQUIRE(c.exit_code == 0);
    REQUIRE(!c.file_content.empty());
    REQUIRE(c.file_content == d.file_content);
}

TEST_CASE("random-check reports zero violations and echoes the seed") {
    const auto r = run_cli("random-check --trials 10 --seed 3", "check.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.file_content);
    CHECK(j["violations"] == 0);
    CHECK(j["trials"] == 10);
    CHECK(j["header"]["seed"] == 3);
    CHECK(j["header"]["tool"] == "specgap");
    CHECK(j["points"].size() == 30);
    for (const auto& p : j["points"]) REQUIRE(p["inside"] == true);
}

TEST_CASE("solve emits the polluted Galerkin spectrum") {
    const auto r = run_cli("solve --problem block --h 0.015625", "solve.csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.file_content);
    REQUIRE(rows.size() > 100);
    int fog = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][1]);
        if (x > 1.05 && x < 1.95) ++fog;
    }
    CHECK(fog >= 1);
}

TEST_CASE("perturb reports a lifted candidate at the folded eigenvalue") {
    const auto r = run_cli("perturb --problem block --h 0.125 --refine 3", "perturb.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.file_content);
    CHECK(j["fine_dim"] == 128);
    bool found = false;
    for (const auto& e : j["eigenvalues"]) {
        if (e["class"] != "lifted-candidate") continue;
        const double fr = e["folded"][0].get<double>();
        const double fi = e["folded"][1].get<double>();
        if (std::abs(fr - 2.0) < 1e-8 && std::abs(fi) < 1e-8) found = true;
    }
    CHECK(found);
    CHECK(j["galerkin"].size() == 128);
}

TEST_CASE("converge emits rows and a slope footer") {
    const auto r = run_cli(
        "converge --problem block --h-list 0.5,0.25,0.125 --refine 5 --format csv",
        "converge.csv");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.file_content);
    REQUIRE(rows.size() == 5);  // header + 3 rows + slope footer
    CHECK(rows[0][0] == "h");
    CHECK(rows[4][0] == "slope");
    const double galerkin_slope = std::stod(rows[4][1]);
    CHECK(galerkin_slope > 1.5);
    CHECK(galerkin_slope < 2.5);
}

TEST_CASE("config file supplies flags and explicit flags win") {
    const fs::path cfg = temp_dir() / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({"rect": "0,1,-1,1", "samples": 3, "seed": 42})";
    }
    const auto defaults =
        run_cli("--config " + cfg.string() + " curves", "cfg_defaults.csv");
    REQUIRE(defaults.exit_code == 0);
    const auto rows = parse_csv(defaults.file_content);
    REQUIRE(rows.size() == 4);  // samples from the config file
    CHECK(defaults.file_content.find("# seed: 42") != std::string::npos);

    const auto overridden =
        run_cli("--config " + cfg.string() + " curves --samples 5", "cfg_override.csv");
    REQUIRE(overridden.exit_code == 0);
    REQUIRE(parse_csv(overridden.file_content).size() == 6);  // flag wins
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("perturb --problem no-such-problem --h 0.125", "bad.json").exit_code == 1);
    CHECK(run_cli("converge --problem mhd --h-list 0.5,0.25,0.125", "bad2.csv").exit_code ==
          1);  // no --lambda and no default
    CHECK(run_cli("nonsense", "bad3.csv").exit_code == 1);
}

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpistab/cli.hpp"
#include "dpistab/errors.hpp"
#include "dpistab/format.hpp"
#include "dpistab/series.hpp"

namespace fs = std::filesystem;
using dpistab::cli::parse_range;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dpistab_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

int tool(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + DPISTAB_TOOL_PATH + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) {
            cells.push_back(c);
        }
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void check_manifest(const fs::path& dir, const std::string& command, std::size_t outputs) {
    const auto m = json(dir / "manifest.json");
    CHECK(m["command"] == command);
    CHECK(m["tool_version"] == dpistab::cli::tool_version);
    REQUIRE(m["outputs"].size() == outputs);
    for (const auto& o : m["outputs"]) {
        CHECK(fs::exists(o.get<std::string>()));
    }
}

}  // namespace

TEST_CASE("range parsing") {
    const auto a = parse_range("0:1:0.1");
    CHECK(a.size() == 11);
    CHECK(a.front() == 0.0);
    CHECK(a.back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(parse_range("0.25") == std::vector<double>{0.25});
    CHECK(parse_range("0:1:0.3").size() == 4);
    CHECK(parse_range("0:1:0.4").size() == 4);  // 1.2 is within half a step of 1
    CHECK(parse_range("2:2:1") == std::vector<double>{2.0});
    CHECK(parse_range("0:8:0.01").size() == 801);
    CHECK_THROWS_AS(parse_range("1:0:0.1"), dpistab::DomainError);
    CHECK_THROWS_AS(parse_range("0:1:0"), dpistab::DomainError);
    CHECK_THROWS_AS(parse_range("0:1"), dpistab::DomainError);
    CHECK_THROWS_AS(parse_range("0:1:0.1:2"), dpistab::DomainError);
    CHECK_THROWS_AS(parse_range("x"), dpistab::DomainError);
    CHECK_THROWS_AS(parse_range(""), dpistab::DomainError);
}

TEST_CASE("border command") {
    const auto d = scratch("border1");
    REQUIRE(tool("-o " + d.string() + " border --z 1 --eps-hat 0:1:0.1 --scheme explicit") == 0);
    const auto rows = csv(d / "border.csv");
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"eps_hat", "r_border"});
    CHECK(rows[1] == std::vector<std::string>{"0", "1"});
    check_manifest(d, "border", 1);

    const auto d2 = scratch("border2");
    REQUIRE(tool("-o " + d2.string() + " border --z 2 --eps-hat 0.1") == 0);
    const auto r2 = csv(d2 / "border.csv");
    REQUIRE(r2.size() == 2);
    CHECK(r2[1][1] == dpistab::format_double(dpistab::explicit_border_r(0.1, 2).r_max));

    const auto d3 = scratch("border3");
    REQUIRE(tool("-o " + d3.string() + " border --z 1 --eps-hat 1 --scheme implicit") == 0);
    const auto r3 = csv(d3 / "border.csv");
    REQUIRE(r3.size() == 2);
    CHECK(r3[0] == std::vector<std::string>{"eps_hat", "r_border", "r_low", "r_high"});
    CHECK(std::stod(r3[1][2]) == doctest::Approx(0.1716).epsilon(1e-3));
    CHECK(std::stod(r3[1][3]) == doctest::Approx(5.8284).epsilon(1e-4));
}

TEST_CASE("usage errors exit with 2") {
    const auto d = scratch("usage");
    CHECK(tool("-o " + d.string() + " border --z 1") == 2);
    CHECK(tool("-o " + d.string() + " border --eps-hat 1:0:0.1") == 2);
    CHECK(tool("-o " + d.string() + " border --eps-hat 0.1 --scheme rk4") == 2);
    CHECK(tool("-o " + d.string() + " border --eps-hat 0.1 --z 0") == 2);
    CHECK(tool("-o " + d.string() + " frobnicate") == 2);
    CHECK(tool("") == 2);
    CHECK(tool("-o " + d.string() + " scan --r 0:1:0.1 --eps-hat 2:1:0.1") == 2);
    CHECK(tool("-o " + d.string() + " amplitudes --r 1.2") == 2);
    CHECK(tool("-o " + d.string() + " poisson --m 100 --beta 0.1 --sweep") == 2);
    CHECK(tool("-o " + d.string() + " poisson --m 100") == 2);
    CHECK(tool("-o " + d.string() + " fourier --coeff 1,2,-0.1 --eta 0:1:0.1 --eta 0:1:0.1") == 2);
    CHECK(tool("-o " + d.string() + " fourier --coeff 1,0,-0.1 --eta 0:1:0.1") == 2);
    CHECK(tool("-o " + d.string() + " scan --r 0:1:0.5 --eps-hat 0", "DPISTAB_MAX_ITER=abc") == 2);
    CHECK(tool("--help") == 0);
}

TEST_CASE("scan command") {
    const auto d = scratch("scan");
    REQUIRE(tool("-o " + d.string() + " scan --z 1 --r 0:1:0.05 --eps-hat 0:1:0.1") == 0);
    const auto rows = csv(d / "region.csv");
    REQUIRE(rows.size() == 21 * 11 + 1);
    CHECK(rows[0] == std::vector<std::string>{"eps_hat", "r", "analytic", "empirical", "iterations"});
    const auto s = json(d / "summary.json");
    CHECK(s["cells"] == 231);
    CHECK(s.contains("disagreements"));
    check_manifest(d, "scan", 2);

    const auto d2 = scratch("scan_budget");
    REQUIRE(tool("-o " + d2.string() + " scan --r 0.5:0.9:0.1 --eps-hat 0", "DPISTAB_MAX_ITER=3") == 0);
    CHECK(json(d2 / "summary.json")["maxiter"] == 5);
    CHECK(json(d2 / "manifest.json")["parameters"]["max_iter"] == 3);
}

TEST_CASE("scan output is byte-identical across runs") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::string args = " scan --scheme implicit --r 0:8:0.1 --eps-hat 0:1:0.1";
    REQUIRE(tool("-o " + a.string() + args) == 0);
    REQUIRE(tool("-o " + b.string() + args) == 0);
    CHECK(slurp(a / "region.csv") == slurp(b / "region.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("amplitudes command") {
    const auto d = scratch("amp");
    REQUIRE(tool("-o " + d.string() + " amplitudes --r 0.5 --order 8") == 0);
    auto rows = csv(d / "amplitudes.csv");
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"i", "n_used", "recursive", "closed_form", "rel_err"});
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::stod(rows[k][4]) < 1e-8);
    }
    check_manifest(d, "amplitudes", 1);

    const auto z = scratch("amp0");
    REQUIRE(tool("-o " + z.string() + " amplitudes --r 0 --order 4") == 0);
    rows = csv(z / "amplitudes.csv");
    for (std::size_t k = 2; k < rows.size(); ++k) {
        CHECK(std::stod(rows[k][2]) == 0.0);
    }

    const auto im = scratch("amp_impl");
    REQUIRE(tool("-o " + im.string() + " amplitudes --r 0.5 --scheme implicit --order 5 --iterations 1") == 0);
    rows = csv(im / "amplitudes.csv");
    REQUIRE(rows.size() == 7);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::stod(rows[k][2]) == doctest::Approx(std::stod(rows[k][3])).epsilon(1e-14));
    }
}

TEST_CASE("poisson command") {
    const auto d = scratch("poisson_ok");
    REQUIRE(tool("-o " + d.string() + " poisson --m 100 --beta 0.03") == 0);
    CHECK(json(d / "result.json")["status"] == "converged");
    const auto h = csv(d / "history.csv");
    CHECK(h[0] == std::vector<std::string>{"step", "max_norm"});
    check_manifest(d, "poisson", 2);

    const auto bad = scratch("poisson_div");
    REQUIRE(tool("-o " + bad.string() + " poisson --m 100 --beta 0.2") == 0);
    CHECK(json(bad / "result.json")["status"] == "diverged");

    const auto cfg_dir = scratch("poisson_cfg");
    fs::create_directories(cfg_dir);
    {
        std::ofstream f(cfg_dir / "run.json");
        f << R"({"M": 40, "beta": 0.03, "max_iter": 500})";
    }
    REQUIRE(tool("-o " + cfg_dir.string() + " poisson --config " + (cfg_dir / "run.json").string()) == 0);
    const auto r = json(cfg_dir / "result.json");
    CHECK(r["M"] == 40);
    CHECK(r["status"] == "converged");
    CHECK(tool("-o " + cfg_dir.string() + " poisson --config " + (cfg_dir / "missing.json").string()) == 2);
}

TEST_CASE("fourier command") {
    const auto d = scratch("fourier");
    REQUIRE(tool("-o " + d.string() + " fourier --coeff 1,2,-0.1 --eta 0:3:0.01 --eps-hat 0.1") == 0);
    const auto s = json(d / "summary.json");
    CHECK(s["verdict"] == "unstable");
    CHECK(s["theta"].get<double>() == doctest::Approx(9.0).epsilon(1e-10));
    const auto rows = csv(d / "contour.csv");
    CHECK(rows.size() == 302);
    CHECK(rows[0] == std::vector<std::string>{"eta1", "theta", "verdict"});
    check_manifest(d, "fourier", 2);

    const auto d2 = scratch("fourier2");
    REQUIRE(tool("-o " + d2.string() + " fourier --coeff 1,2,-0.05 --coeff 2,2,-0.05 --eta 0:1:0.5 --eta 0:2:1 --eps-hat 0.1") == 0);
    CHECK(csv(d2 / "contour.csv").size() == 10);
    CHECK(json(d2 / "summary.json")["verdict"] == "stable");
}

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("cq_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run cq(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout", err = scratch() / "stderr";
    const std::string cmd = env + " \"" CQ_BIN "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string src(const std::string& rel) {
    return "\"" + (fs::path(CQ_SOURCE_DIR) / rel).string() + "\"";
}

nlohmann::json load(const fs::path& p) {
    return nlohmann::json::parse(slurp(p));
}

nlohmann::json without_timings(nlohmann::json j) {
    j.erase("timings");
    return j;
}

}  // namespace

TEST_CASE("check reports cx1 verdicts with a clean audit") {
    const Run r = cq("check " + src("models/cx1.cqm") + " --direction 0,1");
    CHECK(r.code == 0);
    CHECK(r.out.find("ACQ: fails") != std::string::npos);
    CHECK(r.out.find("A5: holds") != std::string::npos);
    CHECK(r.out.find("audit: clean") != std::string::npos);
}

TEST_CASE("check writes a schema-1 report for the entry game") {
    const fs::path json = scratch() / "entry.json";
    const Run r = cq("check " + src("models/entry.cqm") + " --direction 0,1 -q --json \"" + json.string() + "\"");
    REQUIRE(r.code == 0);
    const auto j = load(json);
    CHECK(j["schema"] == 1);
    CHECK(j["model_fingerprint"].get<std::string>().size() == 16);
    REQUIRE(j["points"].size() == 1);
    const auto theta = j["points"][0]["theta"];
    CHECK(theta[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK(theta[1].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(j["points"][0]["verdicts"]["LICQ"] == "holds");
    CHECK(j["points"][0]["verdicts"]["A2"] == "fails");
    CHECK(j["config"].contains("tol_active"));
    CHECK(j.contains("timings"));
}

TEST_CASE("check output is deterministic apart from timings") {
    const fs::path a = scratch() / "det_a.json", b = scratch() / "det_b.json";
    REQUIRE(cq("check " + src("models/cx2.cqm") + " -q --json \"" + a.string() + "\"").code == 0);
    REQUIRE(cq("check " + src("models/cx2.cqm") + " -q --json \"" + b.string() + "\"").code == 0);
    CHECK(without_timings(load(a)) == without_timings(load(b)));
}

TEST_CASE("check usage and I/O errors exit 1") {
    Run r = cq("check missing.cqm");
    CHECK(r.code == 1);
    CHECK(r.err.find("not found") != std::string::npos);

    r = cq("check " + src("tests/data/no_direction.cqm"));
    CHECK(r.code == 1);
    CHECK(r.err.find("direction") != std::string::npos);

    CHECK(cq("check " + src("models/cx1.cqm") + " --direction 0,1,0").code == 1);
    CHECK(cq("check").code == 1);
    CHECK(cq("").code == 1);
}

TEST_CASE("config overrides and CQKIT_SEED reach the report") {
    const fs::path json = scratch() / "cfg.json";
    REQUIRE(cq("check " + src("models/cx4.cqm") + " -q --tol-active 1e-6 --margin 2e-3 --json \"" + json.string() + "\"",
               "CQKIT_SEED=99")
                .code == 0);
    const auto j = load(json);
    CHECK(j["config"]["tol_active"].get<double>() == 1e-6);
    CHECK(j["config"]["margin"].get<double>() == 2e-3);
    CHECK(j["config"]["seed"] == 99);
}

TEST_CASE("example cx4 passes its golden verdicts") {
    const Run r = cq("example cx4");
    CHECK(r.code == 0);
    CHECK(r.out.find("golden: pass") != std::string::npos);
}

TEST_CASE("example entry-game with pi = (1/2, 1/4, 1/4)") {
    const fs::path json = scratch() / "eg.json";
    const fs::path model = scratch() / "eg.cqm";
    const Run r = cq("example entry-game --pi 0.5,0.25,0.25 -q --out \"" + model.string() + "\" --json \"" +
                     json.string() + "\"");
    CHECK(r.code == 0);
    const auto j = load(json);
    const auto theta = j["points"][0]["theta"];
    // pi11 = 1/2, pi10 = pi01 = 1/4: theta* = (pi01, pi10 / (pi10 + pi11)).
    CHECK(theta[0].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(theta[1].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK(j["golden"]["pass"] == true);
    CHECK(slurp(model).find("eq:") != std::string::npos);
}

TEST_CASE("golden mismatch is reported with exit code 3") {
    // The stated failures along (1,-1) are not reproduced at this vertex.
    const Run r = cq("example entry-game --direction 1,-1");
    CHECK(r.code == 3);
    CHECK(r.out.find("golden mismatch") != std::string::npos);
}

TEST_CASE("example interval-regression agrees with the face classification") {
    const Run r = cq("example interval-regression --direction 1,2 -q");
    CHECK(r.code == 0);
}

TEST_CASE("unknown example exits 1") {
    const Run r = cq("example nonsense");
    CHECK(r.code == 1);
    CHECK(r.err.find("nonsense") != std::string::npos);
}

TEST_CASE("audit-random") {
    SUBCASE("count 0 is a usage error") {
        CHECK(cq("audit-random --count 0").code == 1);
    }
    SUBCASE("degree 3 is a usage error") {
        CHECK(cq("audit-random --count 1 --degree 3").code == 1);
    }
    SUBCASE("single model is deterministic") {
        const fs::path a = scratch() / "ar_a.json", b = scratch() / "ar_b.json";
        REQUIRE(cq("audit-random --count 1 --seed 7 -q --json \"" + a.string() + "\"").code == 0);
        REQUIRE(cq("audit-random --count 1 --seed 7 -q --json \"" + b.string() + "\"").code == 0);
        CHECK(slurp(a) == slurp(b));
        const auto j = load(a);
        CHECK(j["violations"] == 0);
        CHECK(j["models"].size() == 1);
    }
    SUBCASE("thread count does not change the result") {
        const fs::path a = scratch() / "par1.json", b = scratch() / "par2.json";
        REQUIRE(cq("audit-random --count 4 --seed 3 -q --json \"" + a.string() + "\"").code == 0);
        REQUIRE(cq("audit-random --count 4 --seed 3 --parallel 2 -q --json \"" + b.string() + "\"").code == 0);
        auto ja = load(a), jb = load(b);
        ja["config"].erase("parallel");
        jb["config"].erase("parallel");
        for (auto* j : {&ja, &jb}) {
            for (auto& m : (*j)["models"]) {
                m["report"]["config"].erase("parallel");
            }
        }
        CHECK(ja == jb);
    }
    SUBCASE("degree 1 sweep") {
        const Run r = cq("audit-random --count 3 --seed 1 --degree 1");
        CHECK(r.code == 0);
        CHECK(r.out.find("violations 0") != std::string::npos);
    }
}

TEST_CASE("ingest") {
    SUBCASE("three cells give six inequalities") {
        const fs::path out = scratch() / "ingested.cqm";
        const Run r = cq("ingest " + src("tests/data/interval_3cells.csv") + " -o \"" + out.string() + "\"");
        REQUIRE(r.code == 0);
        const std::string text = slurp(out);
        std::size_t n = 0;
        for (std::size_t pos = 0; (pos = text.find("\nineq:", pos)) != std::string::npos; ++pos) {
            ++n;
        }
        CHECK(n == 6);
        CHECK(text.rfind("# interval regression ingested from", 0) == 0);
        // The written file is itself a valid model.
        CHECK(cq("check \"" + out.string() + "\" --direction 0,1 -q").code == 0);
    }
    SUBCASE("w0 > w1 names the row") {
        const Run r = cq("ingest " + src("tests/data/interval_swapped.csv"));
        CHECK(r.code == 1);
        CHECK(r.err.find("row 3") != std::string::npos);
    }
    SUBCASE("empty CSV") {
        CHECK(cq("ingest " + src("tests/data/empty.csv")).code == 1);
    }
}

TEST_CASE("graph prints DOT") {
    const Run r = cq("graph");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("digraph", 0) == 0);
    CHECK(r.out.find("\"A3\" -> \"ACQ\"") != std::string::npos);
}

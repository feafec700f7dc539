#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgeo/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args, const fs::path& dir) {
    args.push_back("--out");
    args.push_back(dir.string());
    std::ostringstream out, err;
    const int code = kgeo::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("kgeo_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double value_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + " ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("classify the sphere equator") {
    const auto d = fresh_dir("classify");
    const auto r = run({"classify", "--surface", "sphere", "--k", "2"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict StrictK") != std::string::npos);
    CHECK(std::abs(value_after(r.out, "defect")) < 1e-6);
    CHECK(slurp(d / "classify.csv").rfind("# command=classify\n# surface=sphere\n# seed=1\n", 0) == 0);
    CHECK(slurp(d / "classify.svg").find("command=classify") != std::string::npos);

    const auto m = run({"classify", "--surface", "torus a=1 b=1", "--geodesic", "custom", "--start", "0.1,0.2", "--dir",
                        "1,1", "--length", "1.41421356237", "--minimal"},
                       d);
    CHECK(m.code == 0);
    CHECK(m.out.find("minimal_k 2") != std::string::npos);
}

TEST_CASE("critical point census on the torus") {
    const auto d = fresh_dir("gs");
    const auto r = run({"gs", "--surface", "torus a=1 b=1", "--p", "0.5,0.5", "--enumerate"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("critical_points 3") != std::string::npos);
    const auto csv = slurp(d / "gs.csv");
    CHECK(csv.find("u,v,sheet\n") != std::string::npos);
}

TEST_CASE("sweep emits c0 and the table") {
    const auto d = fresh_dir("sweep");
    const auto r = run({"sweep", "--family", "ellipsoid", "--k", "3", "--bracket", "0.2,0.99", "--samples", "2",
                        "--k-max", "8", "--grid", "8"},
                       d);
    CHECK(r.code == 0);
    const double c0 = value_after(r.out, "c0");
    CHECK(c0 > 0.2);
    CHECK(c0 < 0.99);
    const auto csv = slurp(d / "sweep.csv");
    CHECK(csv.find("c,cut_distance,equator_length,verdict,minimal_k,class_found,class_smooth\n") != std::string::npos);
    CHECK(csv.find("# c0=") != std::string::npos);
    CHECK(fs::exists(d / "sweep.svg"));

    const auto bad = run({"sweep", "--bracket", "0.7,0.99", "--samples", "2"}, d);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("BadBracket") != std::string::npos);
}

TEST_CASE("exit codes") {
    const auto d = fresh_dir("codes");
    CHECK(run({}, d).code == 1);
    CHECK(run({"nonsense"}, d).code == 1);
    const auto missing = run({"distance", "--surface", "sphere", "--q", "1,1"}, d);
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--p") != std::string::npos);
    CHECK(run({"classify", "--k", "1"}, d).code == 1);
    CHECK(run({"classify", "--tol-factor", "-1"}, d).code == 1);
    CHECK(run({"distance", "--surface", "kind=blob", "--p", "1,1", "--q", "1,2"}, d).code == 1);
    const auto cone = run({"gs", "--surface", "square", "--p", "0.5,0.5", "--q", "0,0"}, d);
    CHECK(cone.code == 2);
    CHECK(cone.err.find("ConePointQuery") != std::string::npos);
    const auto unmet = run({"verify-thm", "--surface", "ellipsoid c=0.5"}, d);
    CHECK(unmet.code == 2);
    CHECK(unmet.err.find("HypothesisUnmet") != std::string::npos);
    CHECK(run({"classify", "--help"}, d).code == 0);
}

TEST_CASE("commands and artifacts") {
    const auto d = fresh_dir("commands");
    auto r = run({"minimizers", "--surface", "torus a=1 b=1", "--p", "0.5,0.5", "--q", "0,0"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("multiplicity 4") != std::string::npos);
    CHECK(slurp(d / "minimizers.json").find("\"multiplicity\": 4") != std::string::npos);

    r = run({"ddist", "--surface", "torus a=1 b=1", "--p", "0,0", "--q", "0.5,0", "--v", "1,0"}, d);
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "ddist") == doctest::Approx(-1.0));

    r = run({"energy", "--surface", "sphere", "--points", "1.5707963267949,0;1.5707963267949,3.14159265358979"}, d);
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "E") == doctest::Approx(39.4784176044).epsilon(1e-9));

    r = run({"balance", "--surface", "torus a=1 b=1", "--points", "0,0;0.5,0"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("kind NonSmoothBalanced") != std::string::npos);

    r = run({"find", "--surface", "torus a=1 b=1", "--random-k", "2", "--seed", "3"}, d);
    CHECK(r.code == 0);
    CHECK(slurp(d / "find_trace.csv").find("# seed=3\n") != std::string::npos);

    r = run({"verify-thm", "--surface", "sphere", "--candidates", "2"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("violations 0") != std::string::npos);
}

TEST_CASE("config file overrides flags and the output directory defaults from the environment") {
    const auto d = fresh_dir("config");
    {
        std::ofstream cfg(d / "run.cfg");
        cfg << "# override\nk = 3\nsurface = ellipsoid c=0.9\n";
    }
    const auto envdir = d / "env";
    ::setenv("KGEO_OUT_DIR", envdir.string().c_str(), 1);
    std::ostringstream out, err;
    const int code = kgeo::cli::run(
        std::vector<std::string>{"classify", "--surface", "sphere", "--k", "2", "--config", (d / "run.cfg").string()},
        out, err);
    ::unsetenv("KGEO_OUT_DIR");
    CHECK(code == 0);
    CHECK(out.str().find("verdict OpenlyK") != std::string::npos);
    const auto csv = slurp(envdir / "classify.csv");
    CHECK(csv.find("# k=3\n") != std::string::npos);
    CHECK(csv.find("# surface=ellipsoid c=0.9\n") != std::string::npos);

    {
        std::ofstream cfg(d / "bad.cfg");
        cfg << "nonsense = 1\n";
    }
    CHECK(run({"classify", "--config", (d / "bad.cfg").string()}, d).code == 1);
}

TEST_CASE("identical runs give identical bytes") {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const std::vector<std::string> cmd = {"find", "--surface", "ellipsoid c=0.7", "--random-k", "3", "--seed", "11",
                                          "--max-iterations", "20"};
    CHECK(run(cmd, a).code == 0);
    CHECK(run(cmd, b).code == 0);
    for (const char* f : {"find.json", "find_trace.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

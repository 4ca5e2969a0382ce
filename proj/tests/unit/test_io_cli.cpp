#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "reslab/cli.hpp"
#include "reslab/error.hpp"
#include "reslab/io.hpp"

using namespace reslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("reslab_test_" + name);
    fs::remove_all(p);
    return p;
}

cli::ExperimentConfig config(json j) { return cli::parse_config(j); }

}  // namespace

TEST_CASE("doubles round-trip through text") {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.28927337893517435}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("CSV tables") {
    CsvTable t({"a", "b"});
    t.row({cell(1), cell(0.5)}).row({cell(std::string("x")), cell(std::size_t{7})});
    CHECK(t.str() == "a,b\n1,0.5\nx,7\n");
    CHECK(t.rows() == 2);
    CHECK_THROWS_AS(t.row({"1"}), ValidationError);
}

TEST_CASE("atomic writes create directories and leave no temporaries") {
    const fs::path dir = scratch("io");
    const fs::path f = dir / "nested" / "out.txt";
    write_atomic(f.string(), "hello\n");
    write_atomic(f.string(), "again\n");
    CHECK(slurp(f) == "again\n");
    CHECK_FALSE(fs::exists(f.string() + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("SVG output is deterministic") {
    SvgPlot empty;
    const std::string e = render_svg(empty);
    CHECK(e.find("<svg") == 0);
    CHECK(e.find("</svg>") != std::string::npos);
    SvgPlot p;
    p.title = "a < b";
    p.series.push_back({"pts", "#000000", false, false, {{0.0, 1.0}, {1.0, 2.0}}});
    p.markers.push_back({"m", 0.5});
    CHECK(render_svg(p) == render_svg(p));
    CHECK(render_svg(p).find("a &lt; b") != std::string::npos);
}

TEST_CASE("config parsing") {
    const auto c = config({{"experiment", "delta"}});
    CHECK(c.experiment == cli::Experiment::Delta);
    CHECK(c.lmax == 32);
    CHECK(c.group == "symmetric3");
    CHECK_THROWS_AS(config({{"experiment", "delta"}, {"bogus", 1}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "nope"}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "delta"}, {"lmax", 2}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "delta"}, {"tol", 0.5}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "congruence"}, {"p", 91}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "equidist"}, {"Ns", {16, 8}}}), ValidationError);
    CHECK_THROWS_AS(config({{"experiment", "delta"}, {"rect", {1, 0, 0, 1}}}), ValidationError);
    const auto r = config({{"experiment", "resonances"}, {"rect", "-0.5,0.5,0,7"}});
    REQUIRE(r.rect);
    CHECK(r.rect->im_max == 7.0);
}

TEST_CASE("config echo omits run-only settings") {
    const auto c = config({{"experiment", "delta"}, {"threads", 4}, {"output_dir", "/tmp/x"}});
    const json j = cli::to_json(c);
    CHECK_FALSE(j.contains("threads"));
    CHECK_FALSE(j.contains("output_dir"));
    CHECK(cli::to_json(cli::parse_config(j)) == j);
}

TEST_CASE("groups from JSON") {
    const SchottkyGroup a = cli::build_group("sl2z-pair");
    const SchottkyGroup b = cli::build_group(json{{"preset", "sl2z-pair"}});
    CHECK(a.m() == b.m());
    const json cyl{{"m", 1},
                   {"discs", {{{"center", -2.0}, {"radius", 1.0}}, {{"center", 2.0}, {"radius", 1.0}}}},
                   {"generators", {{{2, 3}, {1, 2}}}}};
    const SchottkyGroup g = cli::build_group(cyl);
    CHECK(g.m() == 1);
    CHECK(g.has_integer_generators());
    CHECK_THROWS_AS(cli::build_group(json{{"m", 1}}), ValidationError);
    CHECK_THROWS_AS(cli::build_group(json{{"preset", "nosuch"}}), ValidationError);
}

TEST_CASE("exit codes") {
    CHECK(cli::exit_code_for(ValidationError("x", "y")) == 2);
    CHECK(cli::exit_code_for(NumericalError("x", "y")) == 3);
    CHECK(cli::exit_code_for(std::runtime_error("z")) == 3);
}

TEST_CASE("delta run writes its outputs") {
    const fs::path dir = scratch("delta");
    auto c = config({{"experiment", "delta"}, {"group", "symmetric3"}, {"lmax", 16}, {"output_dir", dir.string()}});
    const auto res = cli::run(c);
    CHECK(res.status == 0);
    CHECK(std::stod(res.summary) == doctest::Approx(0.2893).epsilon(1e-3));
    CHECK(fs::exists(dir / "delta.json"));
    CHECK(fs::exists(dir / "pressure.csv"));
    const json d = json::parse(slurp(dir / "delta.json"));
    CHECK(d.contains("delta"));
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical across thread counts") {
    const fs::path d1 = scratch("rep1"), d2 = scratch("rep2");
    auto c = config({{"experiment", "resonances"}, {"group", "cylinder"}, {"lmax", 24}, {"rect", "-0.5,0.5,0,7"}});
    c.output_dir = d1.string();
    c.threads = 1;
    const auto r1 = cli::run(c);
    c.output_dir = d2.string();
    c.threads = 3;
    const auto r2 = cli::run(c);
    REQUIRE(r1.status == 0);
    REQUIRE(r2.status == 0);
    CHECK(r1.outputs.size() == r2.outputs.size());
    for (const auto& entry : fs::directory_iterator(d1)) {
        CAPTURE(entry.path());
        CHECK(slurp(entry.path()) == slurp(d2 / entry.path().filename()));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("invalid group run maps to status 2") {
    const json bad{{"m", 1},
                   {"discs", {{{"center", -1.0}, {"radius", 1.5}}, {{"center", 1.0}, {"radius", 1.5}}}},
                   {"generators", {{{2, 3}, {1, 2}}}}};
    auto c = config({{"experiment", "delta"}, {"group", bad}});
    c.output_dir = scratch("bad").string();
    CHECK(cli::run(c).status == 2);
}

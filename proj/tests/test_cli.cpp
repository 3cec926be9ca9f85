#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "fheston/verify.hpp"

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "fheston");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fheston::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("csv headers of every verb") {
    const std::pair<std::vector<std::string>, std::string> cases[] = {
        {{"cgf", "--u", "0.5", "--t", "1"}, "u,w,t,value,status"},
        {{"price", "--x", "0.1", "--t", "1"}, "x,t,price,implied_vol"},
        {{"smile", "--t", "0.5", "--x-steps", "3"}, "x,t,implied_vol,source"},
        {{"asymptote", "--x-steps", "2"}, "x,payoff,asymptote"},
        {{"simulate", "--paths", "100", "--steps", "10"}, "x,t,price,std_error,implied_vol,n_paths,seed"},
        {{"ratefn", "--x-steps", "2"}, "x,rate,branch"},
        {{"verify", "--suite", "bounds"}, "name,expected,observed,tolerance,pass"},
    };
    for (const auto& [args, header] : cases) {
        CAPTURE(args.front());
        const Result r = run(args);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        CHECK(first_line(r.out) == header);
    }
}

TEST_CASE("cgf at u = 1 vanishes") {
    const Result r = run({"cgf", "--u", "1", "--t", "5"});
    CHECK(r.code == 0);
    CHECK(r.out == "u,w,t,value,status\n1,0,5,0,converged\n");
}

TEST_CASE("invalid parameters exit 2 with an error object") {
    const Result r = run({"price", "--d", "0.7"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err["kind"] == "OutOfRange");
    CHECK(err["detail"] == "d");
    CHECK(err["error"] == "OutOfRange: d");
}

TEST_CASE("parse errors exit 2") {
    CHECK(run({"verify", "--suite", "nope"}).code == 2);
    CHECK(run({"verify"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"price", "--x", "abc"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("help goes to stdout") {
    const Result r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("cgf blow-up still prints the row and exits 1") {
    const Result r = run({"cgf", "--u", "40", "--t", "50", "--xi", "1", "--d", "0.3"});
    CHECK(r.code == 1);
    CHECK(r.out.find("blew_up") != std::string::npos);
    CHECK(nlohmann::json::parse(r.err).contains("kind"));
}

TEST_CASE("json output") {
    const Result r = run({"price", "--x", "0", "--t", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto rows = nlohmann::json::parse(r.out);
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["x"] == 0.0);
    CHECK(rows[0]["price"].get<double>() > 0.0);
    CHECK(rows[0]["implied_vol"].get<double>() > 0.0);
}

TEST_CASE("config file with flag override") {
    const auto path = std::filesystem::temp_directory_path() / "fheston_cli_test.json";
    {
        std::ofstream f(path);
        f << R"({"kappa": 2, "theta": 0.04, "xi": 0.5, "v0": 0.04, "eta": 0.01, "d": 0.7})";
    }
    CHECK(run({"price", "--config", path.string()}).code == 2);
    const Result fixed = run({"price", "--config", path.string(), "--d", "0", "--x", "0.2"});
    const Result flags = run({"price", "--kappa", "2", "--xi", "0.5", "--d", "0", "--x", "0.2"});
    CHECK(fixed.code == 0);
    CHECK(fixed.out == flags.out);
    std::filesystem::remove(path);
    CHECK(run({"price", "--config", path.string()}).code == 2);
}

TEST_CASE("seeded simulation output is byte-identical") {
    const std::vector<std::string> args{"simulate", "--paths", "2000", "--steps", "20", "--seed", "11",
                                        "--x", "-0.1", "--x", "0.1"};
    const Result a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto with_workers = args;
    with_workers.insert(with_workers.end(), {"--workers", "3"});
    CHECK(run(with_workers).out == a.out);
}

TEST_CASE("verify suites that need no simulation pass") {
    for (const char* suite : {"bounds", "oracle"}) {
        CAPTURE(suite);
        const Result r = run({"verify", "--suite", suite});
        CHECK(r.code == 0);
        CHECK(r.out.find(",false") == std::string::npos);
    }
}

TEST_CASE("make_check and parse_suite") {
    using namespace fheston;
    CHECK(make_check("a", 1.0, 1.05, 0.1).pass);
    CHECK_FALSE(make_check("a", 1.0, 1.2, 0.1).pass);
    CHECK_FALSE(make_check("a", 1.0, NAN, 0.1).pass);
    CHECK(parse_suite("mc") == Suite::mc);
    CHECK(to_string(Suite::largetime) == "largetime");
    CHECK_THROWS_AS(parse_suite("MC"), Error);
}

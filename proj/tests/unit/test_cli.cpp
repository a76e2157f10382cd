#include "doctest.h"

#include <array>
#include <cstdio>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run plgz(const std::string& args) {
    Run r;
    const std::string cmd = std::string(PLGZ_BINARY) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

const std::string kData = std::string(PLGZ_SOURCE_DIR) + "/tests/data";

}  // namespace

TEST_CASE("cli classify reads a diagram file") {
    auto r = plgz("classify --diagram " + kData + "/C4.json");
    REQUIRE(r.status == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["rank"] == 4);
    CHECK(j["results"]["type"] == "II");
    CHECK(j["results"]["one_type"] == "(A,1)");
    CHECK(j["pass"] == true);
}

TEST_CASE("cli table and tate verification") {
    CHECK(plgz("table1 -p 3").status == 0);
    auto r = plgz("verify-tate -p 5 --trials 10");
    REQUIRE(r.status == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["max_residual"].get<double>() < 1e-6);
}

TEST_CASE("cli usage errors exit with 2") {
    CHECK(plgz("no-such-command").status == 2);
    CHECK(plgz("table1 --tol 0.5").status == 2);
    CHECK(plgz("rho --delta 0 --s 0.3").status == 0);
    CHECK(plgz("rho --delta 0 --s abc").status == 2);
    CHECK(plgz("quadform --form 1,zz").status == 2);
    CHECK(plgz("classify -p 4 --row 6 --param 4").status == 2);
}

TEST_CASE("cli reports are reproducible") {
    auto a = plgz("verify-weil -p 3 --seed 5");
    auto b = plgz("verify-weil -p 3 --seed 5");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli orbit and gamma") {
    auto r = plgz("orbit --family SP --n 2 --matrix '[[\"1\",\"0\"],[\"0\",\"p^1*2\"]]'");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out)["results"]["rank"] == 2);
    auto g = plgz("gamma -p 5 --a 1,eps --c pi --direct");
    REQUIRE(g.status == 0);
    CHECK(nlohmann::json::parse(g.out)["results"]["residual"].get<double>() < 1e-6);
}

// Acceptance run: one PASS/FAIL line per criterion, a criterion passes when its
// checks pass within tolerance and it finishes inside its time budget.
// An optional argument names a file for the full JSON report.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "plgz/report.hpp"

using namespace plgz;

namespace {

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<SuiteResult()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::cout << std::unitbuf;
    const std::vector<Criterion> criteria = {
        {1, "table reproduction", 1.0, [] { return check_table1(); }},
        {2, "quadratic forms", 10.0, [] { return check_quadratic_forms({3, 5, 7}); }},
        {3, "Weil layer", 30.0, [] { return check_weil_layer({3, 5}, 7, 1e-9); }},
        {4, "Tate layer", 30.0, [] { return check_tate_layer({3, 5}, 10, 11, 1e-9); }},
        {5, "graded rank one functional equation", 10.0, [] { return check_rank_one_fe({3, 5}, 13, 1e-9); }},
        {6, "coefficient engine", 30.0, [] { return check_coefficients({3, 5}, 17, 5, 1e-9); }},
        {7, "realization cross-checks", 120.0, [] { return check_realizations(3, 19, 1000, 100); }},
        {8, "gamma oracle", 60.0, [] { return check_gamma_oracle({3, 5}, 1e-6); }},
        {9, "mean-function identity", 60.0, [] { return check_mean_identity(3, 5, 1e-6); }},
        {10, "census functional equation (k=1, SP)", 300.0, [] { return check_census_fe(3, 4, 5, 1e-3); }},
    };

    nlohmann::json report = nlohmann::json::array();
    int failed = 0;
    for (const auto& c : criteria) {
        SuiteResult r;
        bool crashed = false;
        std::string error;
        try {
            r = c.run();
        } catch (const std::exception& ex) {
            crashed = true;
            error = ex.what();
        }
        const bool in_time = !crashed && r.seconds <= c.budget_seconds;
        const bool ok = !crashed && r.pass && in_time;
        failed += !ok;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s of %.0f s", crashed ? 0.0 : r.seconds, c.budget_seconds);
        std::cout << "criterion " << c.id << " (" << c.title << "): " << (ok ? "PASS" : "FAIL") << " [";
        if (crashed) {
            std::cout << "exception: " << error << "]\n";
            report.push_back({{"criterion", c.id}, {"pass", false}, {"error", error}});
            continue;
        }
        std::cout << r.checks - r.failures << "/" << r.checks << " checks";
        if (r.tolerance > 0) std::cout << ", max residual " << r.max_residual << " (tol " << r.tolerance << ")";
        std::cout << ", " << timing << (in_time ? "" : ", over budget") << "]\n";
        for (const auto& m : r.failure_messages) std::cout << "    failed: " << m << "\n";
        for (const auto& w : r.warnings) std::cout << "    warning: " << w << "\n";
        if (c.id == 10 && r.details.contains("max_relative"))
            std::cout << "    largest per-orbit relative deviation: " << r.details["max_relative"].get<double>() << "\n";
        auto j = r.to_json(true);
        j["criterion"] = c.id;
        j["budget_seconds"] = c.budget_seconds;
        j["pass"] = ok;
        report.push_back(j);
    }
    if (argc > 1) std::ofstream(argv[1]) << report.dump(2) << "\n";
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "plgz/laurent.hpp"

namespace plgz {

/**
 * Outcome of one verification suite. Failure messages keep the first few
 * offending cases; timings are kept apart so reports stay reproducible.
 */
struct SuiteResult {
    std::string name;
    bool pass = true;
    long checks = 0;
    long failures = 0;
    double max_residual = 0;
    double tolerance = 0;
    double seconds = 0;
    std::vector<std::string> failure_messages;
    std::vector<std::string> warnings;
    nlohmann::json details = nlohmann::json::object();

    void check(bool ok, const std::string& what);
    // records r and fails when r > tol (or r is not finite)
    void residual(double r, double tol, const std::string& what);
    std::string summary() const;
    nlohmann::json to_json(bool with_timing = false) const;
};

nlohmann::json to_json(cplx z);

// profile of every sampled table family against the golden table
SuiteResult check_table1();
// isotropy oracles, anisotropic forms, S_e
SuiteResult check_quadratic_forms(const std::vector<int>& primes);
// alpha, gamma of forms and the scaling law; Weil's Fourier identity with ball functions
SuiteResult check_weil_layer(const std::vector<int>& primes, uint64_t seed, double tol = 1e-9);
// rho reflection on a grid and the rational Tate functional equation for random ball functions
SuiteResult check_tate_layer(const std::vector<int>& primes, int trials, uint64_t seed, double tol = 1e-9);
// graded rank one functional equation as an identity of rational functions, every kind of S_e
SuiteResult check_rank_one_fe(const std::vector<int>& primes, uint64_t seed, double tol = 1e-9);
// D recursion against the closed product, even-e forms, B retwists, epsilon identities and psi-scaling
SuiteResult check_coefficients(const std::vector<int>& primes, uint64_t seed, int points = 5, double tol = 1e-9);
// matrix realizations at p: dimensions, ranks, relative invariance, orbit labels, iota identities
SuiteResult check_realizations(int p, uint64_t seed, int orbit_elements = 1000, int moves = 100);
// gamma_k formula against the oscillatory-sum Weil index in the symplectic model, k = 1, 2
SuiteResult check_gamma_oracle(const std::vector<int>& primes, double tol = 1e-6);
// mean-function integration identity on the symmetric 2 x 2 model
SuiteResult check_mean_identity(int p, int functions, double tol = 1e-6);
// census-based functional equation for symmetric 2 x 2 matrices
SuiteResult check_census_fe(int p, int depth, int points, double tol = 1e-3);

}  // namespace plgz

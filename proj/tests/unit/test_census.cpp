#include "doctest.h"

#include <cmath>

#include "plgz/census.hpp"

using namespace plgz;

TEST_CASE("census strata partition the lattice") {
    auto ctx = make_context(3);
    RealizationContext R(Family::SP, 2, ctx);
    for (Side side : {Side::Plus, Side::Minus}) {
        Census C = run_census(R, side, 2);
        CHECK(C.total == 19683);  // 3^{3 * 3}, modulo p^{V+1}
        int64_t counted = C.tail;
        for (const auto& [key, cnt] : C.counts) counted += cnt;
        CHECK(counted == C.total);
        CHECK(std::abs(C.cell_volume() * C.total - 1.0) < 1e-12);

        Census back = Census::from_json(C.to_json());
        CHECK(back.counts == C.counts);
        CHECK(back.tail == C.tail);
    }
}

TEST_CASE("census unit stratum matches the count of invertible symmetric matrices") {
    // symmetric 2 x 2 over F_3 with nonzero Delta_1 = x and nonzero determinant
    auto ctx = make_context(3);
    RealizationContext R(Family::SP, 2, ctx);
    Census C = run_census(R, Side::Plus, 1);
    int64_t unit = 0;
    for (const auto& [key, cnt] : C.counts)
        if (key[0] == 0 && key[1] == 0) unit += cnt;
    int64_t brute = 0;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z)
                if (x != 0 && ((x * z - y * y) % 3 + 3) % 3 != 0) ++brute;
    // each residue class mod p lifts to p^{dim} cells mod p^2
    CHECK(unit == brute * 27);
}

TEST_CASE("reconstruction recovers a geometric series") {
    TruncatedZeta Z;
    Z.nvars = 1;
    Z.depth = 6;
    for (int v = 0; v <= 6; ++v) Z.coeffs[{v}] = cplx(std::pow(3.0, -v));
    auto rec = reconstruct(Z, 3);
    REQUIRE(rec.ok);
    for (double t : {0.2, 0.5, -0.7}) {
        const cplx T = t;
        CHECK(std::abs(rec.eval({T}) - 1.0 / (1.0 - T / 3.0)) < 1e-9);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "decospace/covering.hpp"

using namespace decospace;

namespace {

std::vector<int> besov_js(const TruncatedIndexSet& idx) {
    std::vector<int> js;
    for (const auto& i : idx.indices) js.push_back(i.j);
    std::sort(js.begin(), js.end());
    return js;
}

std::vector<int> alpha_ks_1d(const TruncatedIndexSet& idx) {
    std::vector<int> ks;
    for (const auto& i : idx.indices) ks.push_back(i.k[0]);
    std::sort(ks.begin(), ks.end());
    return ks;
}

} // namespace

TEST_CASE("alpha covering at alpha = 0 degrades to the uniform lattice") {
    auto cov = build_alpha_covering(1, 0.0, 1.0);
    auto uni = build_uniform_covering(1, 1.0);
    auto idx = truncate(cov, 5.0);
    for (const auto& i : idx.indices) {
        auto pa = cov.piece(i);
        auto pu = uni.piece(i);
        CHECK(pa.t == doctest::Approx(1.0));
        CHECK(pa.t == doctest::Approx(pu.t));
        CHECK(pa.b[0] == doctest::Approx(pu.b[0]));
        CHECK(pa.base.r == doctest::Approx(pu.base.r));
    }
}

TEST_CASE("alpha = 1/2 doubles the scale at |k| = 2") {
    auto cov = build_alpha_covering(2, 0.5, 1.0);
    CHECK(cov.alpha0() == doctest::Approx(1.0));
    auto piece = cov.piece(CoverIndex{0, {2, 0}});
    CHECK(piece.t == doctest::Approx(2.0));
    CHECK(piece.b[0] == doctest::Approx(4.0));
    CHECK(piece.b[1] == doctest::Approx(0.0));
}

TEST_CASE("alpha = 1/2 covering passes the dense covering check on [-100, 100]") {
    auto cov = build_alpha_covering(1, 0.5, 1.0);
    auto idx = truncate(cov, 100.0);
    // freq_step = 0.01, trusted radius 61.44 < 100.
    GridSpec grid(1, 16384, 50.0);
    auto report = covering_check(cov, idx, grid);
    // The origin is reached only as a boundary point of the |k| = 1 balls, so
    // the shrunken inner family is not asserted here.
    CHECK(report.covered);
}

TEST_CASE("alpha covering rejects alpha >= 1") {
    CHECK_THROWS_AS((void)build_alpha_covering(1, 1.0, 1.0), config_error);
}

TEST_CASE("Besov pieces: low-pass ball and dyadic annuli") {
    auto cov = build_besov_covering(1);
    auto p0 = cov.piece(CoverIndex{0, {0, 0}});
    CHECK(p0.t == doctest::Approx(1.0));
    CHECK(p0.base.kind == BaseSet::Kind::ball);
    CHECK(p0.base.r == doctest::Approx(2.0));

    auto p3 = cov.piece(CoverIndex{3, {0, 0}});
    CHECK(p3.t == doctest::Approx(8.0));
    CHECK(p3.base.kind == BaseSet::Kind::annulus);
    CHECK(p3.base.a == doctest::Approx(0.25));
    CHECK(p3.base.b == doctest::Approx(4.0));
    // Q_3 = {2 < |xi| < 32}.
    CHECK(!p3.base.contains(Point{2.0 / 8.0, 0.0}, 1));
    CHECK(p3.base.contains(Point{2.01 / 8.0, 0.0}, 1));
    CHECK(p3.base.contains(Point{31.99 / 8.0, 0.0}, 1));
    CHECK(!p3.base.contains(Point{32.0 / 8.0, 0.0}, 1));
}

TEST_CASE("Besov covering check passes up to Xi = 500") {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 500.0);
    GridSpec grid(1, 4096, 2.0); // trusted radius 384
    auto report = covering_check(cov, idx, grid);
    CHECK(report.covered);
    CHECK(report.inner_covered);
}

TEST_CASE("Besov truncation at Xi = 10 keeps exactly j <= 5") {
    auto idx = truncate(build_besov_covering(1), 10.0);
    CHECK(besov_js(idx) == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(!idx.empty_warning);
}

TEST_CASE("uniform-ball truncation at Xi = 3 keeps 1 <= |k| <= 4") {
    auto idx = truncate(build_alpha_covering(1, 0.0, 1.0), 3.0);
    CHECK(alpha_ks_1d(idx) == std::vector<int>{-4, -3, -2, -1, 1, 2, 3, 4});
}

TEST_CASE("truncation below the nearest piece is empty with a warning") {
    auto idx = truncate(build_alpha_covering(1, 0.0, 0.4), 0.5);
    CHECK(idx.indices.empty());
    CHECK(idx.empty_warning);
}

TEST_CASE("Besov clusters: low-pass triple and interior 7-neighborhoods") {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 300.0); // j in {0..10}
    REQUIRE(besov_js(idx) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    auto cl = clusters(cov, idx);

    auto cluster_js = [&](std::size_t pos) {
        std::set<int> js;
        for (std::size_t l : cl[pos]) js.insert(idx.indices[l].j);
        return js;
    };
    CHECK(cluster_js(0) == std::set<int>{0, 1, 2});
    for (int j = 4; j <= 7; ++j) {
        std::set<int> expect;
        for (int l = j - 3; l <= j + 3; ++l) expect.insert(l);
        CHECK(cluster_js(static_cast<std::size_t>(j)) == expect);
    }

    auto cons = admissibility_constants(cov, idx, cl);
    CHECK(cons.N_Q == 7);
    CHECK(cons.R_Q == doctest::Approx(4.0));
    CHECK(cons.C_Q == doctest::Approx(8.0));
}

TEST_CASE("uniform clusters at r = 0.6 are the three nearest lattice points") {
    auto cov = build_alpha_covering(1, 0.0, 0.6);
    auto idx = truncate(cov, 10.0);
    auto cl = clusters(cov, idx);
    for (std::size_t pos = 0; pos < idx.indices.size(); ++pos) {
        int k = idx.indices[pos].k[0];
        if (std::abs(k) >= 9) continue; // skip truncation edges
        std::set<int> got;
        for (std::size_t l : cl[pos]) got.insert(idx.indices[l].k[0]);
        std::set<int> expect{k - 1, k, k + 1};
        expect.erase(0); // zero is not an index of the alpha lattice
        CHECK(got == expect);
    }
}

TEST_CASE("singleton truncation clusters to itself") {
    auto cov = build_besov_covering(1);
    TruncatedIndexSet idx;
    idx.indices = {CoverIndex{4, {0, 0}}};
    idx.Xi = 1.0;
    auto cl = clusters(cov, idx);
    REQUIRE(cl.size() == 1);
    CHECK(cl[0] == std::vector<std::size_t>{0});
}

TEST_CASE("cluster relation is symmetric and monotone under enlargement") {
    auto cov = build_alpha_covering(1, 0.5, 1.0);
    auto small = truncate(cov, 32.0);
    auto large = truncate(cov, 64.0);
    CHECK(large.indices.size() >= small.indices.size());
    for (const auto& i : small.indices) {
        CHECK(std::find(large.indices.begin(), large.indices.end(), i) != large.indices.end());
    }

    auto cl = clusters(cov, large);
    for (std::size_t i = 0; i < cl.size(); ++i) {
        for (std::size_t l : cl[i]) {
            CHECK(std::find(cl[l].begin(), cl[l].end(), i) != cl[l].end());
        }
    }

    // Restricted to the smaller index set, clusters never shrink.
    auto cl_small = clusters(cov, small);
    for (std::size_t i = 0; i < small.indices.size(); ++i) {
        auto pos_large = static_cast<std::size_t>(
            std::find(large.indices.begin(), large.indices.end(), small.indices[i]) -
            large.indices.begin());
        for (std::size_t l : cl_small[i]) {
            const auto& target = small.indices[l];
            bool found = false;
            for (std::size_t m : cl[pos_large]) found = found || large.indices[m] == target;
            CHECK(found);
        }
    }
}

TEST_CASE("uniform covering has trivial dilations") {
    auto cov = build_alpha_covering(1, 0.0, 0.6);
    auto idx = truncate(cov, 8.0);
    auto cons = admissibility_constants(cov, idx, clusters(cov, idx));
    CHECK(cons.C_Q == doctest::Approx(1.0));
}

TEST_CASE("alpha = 1/2 admissibility constants are stable under truncation doubling") {
    auto cov = build_alpha_covering(1, 0.5, 1.0);
    auto idx64 = truncate(cov, 64.0);
    auto idx128 = truncate(cov, 128.0);
    auto c64 = admissibility_constants(cov, idx64, clusters(cov, idx64));
    auto c128 = admissibility_constants(cov, idx128, clusters(cov, idx128));
    CHECK(std::abs(c64.C_Q - c128.C_Q) <= 0.01 * c64.C_Q);

    auto w = ModerateWeightSpec::alpha_power(1.0, 0.5);
    double m64 = weight_moderateness(cov, w, idx64, clusters(cov, idx64));
    double m128 = weight_moderateness(cov, w, idx128, clusters(cov, idx128));
    CHECK(std::abs(m64 - m128) <= 0.01 * m64);
}

TEST_CASE("dyadic moderateness over the Besov covering is 2^{3|s|}") {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 300.0);
    auto cl = clusters(cov, idx);
    for (double s : {0.5, 1.0, -2.0}) {
        double got = weight_moderateness(cov, ModerateWeightSpec::dyadic(s), idx, cl);
        CHECK(got == doctest::Approx(std::pow(2.0, 3.0 * std::abs(s))).epsilon(1e-12));
    }
    CHECK(weight_moderateness(cov, ModerateWeightSpec::one(), idx, cl) == doctest::Approx(1.0));
}

TEST_CASE("Besov constants are truncation-independent beyond Xi = 64") {
    auto cov = build_besov_covering(1);
    auto idx1 = truncate(cov, 64.0);
    auto idx2 = truncate(cov, 128.0);
    auto cl1 = clusters(cov, idx1);
    auto cl2 = clusters(cov, idx2);
    auto a1 = admissibility_constants(cov, idx1, cl1);
    auto a2 = admissibility_constants(cov, idx2, cl2);
    CHECK(a1.N_Q == a2.N_Q);
    CHECK(a1.C_Q == doctest::Approx(a2.C_Q));
    auto w = ModerateWeightSpec::dyadic(1.0);
    CHECK(weight_moderateness(cov, w, idx1, cl1) ==
          doctest::Approx(weight_moderateness(cov, w, idx2, cl2)));
}

TEST_CASE("uniform balls of radius 0.4 leave gaps; radius 0.6 covers") {
    // The alpha lattice omits k = 0 and so never covers a neighborhood of the
    // origin for r < 1; the equal-radius claim is about the uniform covering.
    GridSpec grid(1, 256, 8.0); // trusted radius 6, freq step 1/16
    auto cov4 = build_uniform_covering(1, 0.4);
    auto cov6 = build_uniform_covering(1, 0.6);
    auto r4 = covering_check(cov4, truncate(cov4, 8.0), grid);
    auto r6 = covering_check(cov6, truncate(cov6, 8.0), grid);
    CHECK(!r4.covered);
    CHECK(!r4.uncovered.empty());
    CHECK(r6.covered);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "decospace/amalgam.hpp"
#include "decospace/grid.hpp"
#include "decospace/testfields.hpp"

using namespace decospace;

namespace {

constexpr double kPi = std::numbers::pi;

SampledField constant_field(const GridSpec& g, cdouble c) {
    return SampledField::from_space(g, std::vector<cdouble>(g.size(), c));
}

SampledField sum_fields(const SampledField& a, const SampledField& b) {
    std::vector<cdouble> v(a.space().begin(), a.space().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.space()[i];
    return SampledField::from_space(a.spec(), std::move(v));
}

SampledField spectral_derivative(const SampledField& f, int axis) {
    std::vector<cdouble> fr(f.freq().begin(), f.freq().end());
    for (std::size_t i = 0; i < fr.size(); ++i) {
        Point xi = f.spec().freq_point(i);
        fr[i] *= cdouble(0.0, 2.0 * kPi * xi[axis]);
    }
    return SampledField::from_freq(f.spec(), std::move(fr));
}

SampledField convolve(const SampledField& a, const SampledField& b) {
    std::vector<cdouble> fr(a.freq().begin(), a.freq().end());
    for (std::size_t i = 0; i < fr.size(); ++i) fr[i] *= b.freq()[i];
    return SampledField::from_freq(a.spec(), std::move(fr));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST_CASE("maximal function of a constant is its modulus") {
    GridSpec g(1, 128, 4.0);
    auto f = constant_field(g, cdouble(-2.0, 1.5));
    auto m = maximal_function(f, Window::cube(0.5));
    double expect = std::abs(cdouble(-2.0, 1.5));
    for (cdouble v : m.space()) CHECK(std::abs(v - expect) <= 1e-14);
}

TEST_CASE("maximal function of a spike is a window-wide bump") {
    GridSpec g(1, 64, 2.0);
    std::vector<cdouble> vals(g.size(), 0.0);
    vals[g.n / 2] = cdouble(0.0, 3.0); // spike at x = 0
    auto f = SampledField::from_space(g, std::move(vals));
    auto m = maximal_function(f, Window::cube(g.h()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.point(i)[0];
        double got = m.space()[i].real();
        if (std::abs(x) <= g.h() + 1e-12)
            CHECK(got == doctest::Approx(3.0));
        else
            CHECK(got == doctest::Approx(0.0));
    }
}

TEST_CASE("maximal function is monotone in the window") {
    GridSpec g(1, 256, 4.0);
    auto f = random_band_limited(g, 17);
    auto m1 = maximal_function(f, Window::cube(0.25));
    auto m2 = maximal_function(f, Window::cube(0.75));
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(m1.space()[i].real() <= m2.space()[i].real() + 1e-14);
}

TEST_CASE("affine cube window divides the halfwidth by the dilation") {
    CHECK(Window::affine_cube(4.0, 1.0).halfwidth == doctest::Approx(0.25));
    CHECK(Window::cube(1.0).halfwidth == doctest::Approx(1.0));
}

TEST_CASE("maximal function dominates the plain norm on 50 random fields") {
    GridSpec g(1, 256, 4.0);
    Window q = Window::cube(0.5);
    for (int t = 0; t < 50; ++t) {
        auto f = random_band_limited(g, 500 + t);
        for (double p : {1.0, 2.0}) {
            double plain = weighted_lp_norm(f, p, WeightSpec::one());
            double wiener = wiener_norm(f, q, p, WeightSpec::one());
            CHECK(plain <= wiener * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("wiener norm of the constant one equals its L2 norm") {
    GridSpec g(1, 128, 4.0);
    auto f = constant_field(g, 1.0);
    double got = wiener_norm(f, Window::cube(0.5), 2.0, WeightSpec::one());
    CHECK(got == doctest::Approx(weighted_lp_norm(f, 2.0, WeightSpec::one())).epsilon(1e-12));
}

TEST_CASE("wiener transformation formula for T = 2 id holds to 3%") {
    GridSpec g(1, 2048, 8.0);
    const double a = 4.0;
    auto base = [&](double x) { return std::exp(-kPi * a * x * x); };
    std::vector<cdouble> v1(g.size()), v2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.point(i)[0];
        v1[i] = base(2.0 * x); // f o T
        v2[i] = base(x);       // f
    }
    auto fT = SampledField::from_space(g, std::move(v1));
    auto f = SampledField::from_space(g, std::move(v2));
    const double p = 2.0, c = 0.5;
    double lhs = wiener_norm(fT, Window::cube(c), p, WeightSpec::one());
    double rhs = std::pow(2.0, -1.0 / p) * wiener_norm(f, Window::cube(2.0 * c), p, WeightSpec::one());
    CHECK(std::abs(lhs - rhs) <= 0.03 * rhs);
}

TEST_CASE("oscillation of a constant vanishes") {
    GridSpec g(1, 64, 2.0);
    auto f = constant_field(g, cdouble(1.0, -7.0));
    auto osc = oscillation(f, Window::cube(0.3));
    for (cdouble v : osc.space()) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("oscillation of a linear ramp is 2c on interior points") {
    GridSpec g(1, 512, 4.0);
    std::vector<cdouble> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vals[i] = g.point(i)[0];
    auto f = SampledField::from_space(g, std::move(vals));
    const double c = 0.25;
    auto osc = oscillation(f, Window::cube(c));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.point(i)[0]) > 2.0) continue; // keep clear of the wrap jump
        CHECK(std::abs(osc.space()[i].real() - 2.0 * c) <= 2.0 * g.h() + 1e-12);
    }
}

TEST_CASE("oscillation is bounded by diameter times maximal gradient") {
    GridSpec g(1, 512, 4.0);
    auto f = random_band_limited(g, 23);
    auto df = spectral_derivative(f, 0);
    auto d2f = spectral_derivative(df, 0);
    double hess_sup = 0.0;
    for (cdouble v : d2f.space()) hess_sup = std::max(hess_sup, std::abs(v));

    const double c = 0.25;
    Window q = Window::cube(c);
    auto osc = oscillation(f, q);
    std::vector<cdouble> absdf(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) absdf[i] = std::abs(df.space()[i]);
    auto mg = maximal_function(SampledField::from_space(g, std::move(absdf)), q);

    double diam = 2.0 * c;
    double tol = 1e-8 + 2.0 * g.h() * hess_sup;
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(osc.space()[i].real() <= diam * mg.space()[i].real() + tol);
}

TEST_CASE("maximal function and oscillation are subadditive") {
    GridSpec g(1, 256, 4.0);
    Window q = Window::cube(0.4);
    for (int t = 0; t < 5; ++t) {
        auto f = random_band_limited(g, 700 + t);
        auto h = random_band_limited(g, 900 + t);
        auto fh = sum_fields(f, h);
        auto m = maximal_function(fh, q);
        auto mf = maximal_function(f, q);
        auto mh = maximal_function(h, q);
        auto o = oscillation(fh, q);
        auto of = oscillation(f, q);
        auto oh = oscillation(h, q);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(m.space()[i].real() <= mf.space()[i].real() + mh.space()[i].real() + 1e-12);
            CHECK(o.space()[i].real() <= of.space()[i].real() + oh.space()[i].real() + 1e-12);
        }
    }
}

TEST_CASE("band-limited self-improvement ratios are uniformly bounded") {
    GridSpec g(1, 256, 4.0);
    Window q = Window::cube(1.0);
    std::vector<double> ratios;
    for (int t = 0; t < 50; ++t) {
        auto f = random_band_limited(g, 1100 + t);
        double w = wiener_norm(f, q, 2.0, WeightSpec::one());
        double n = weighted_lp_norm(f, 2.0, WeightSpec::one());
        ratios.push_back(w / n);
    }
    double mx = *std::max_element(ratios.begin(), ratios.end());
    CHECK(mx <= 10.0 * median(ratios));
}

TEST_CASE("oscillation self-improvement stays bounded as the window shrinks") {
    GridSpec g(1, 512, 4.0);
    Window outer = Window::cube(1.0);
    // Low-bandwidth fields (support radius about 1.2) keep both window sizes
    // in the linear regime osc ~ delta |f'|, where osc/delta must stabilize.
    auto value_at = [&](double delta) {
        double acc = 0.0;
        const int trials = 10;
        for (int t = 0; t < trials; ++t) {
            auto f = random_band_limited(g, 1300 + t, 0.05);
            auto osc = oscillation(f, Window::cube(delta));
            double w = wiener_norm(osc, outer, 2.0, WeightSpec::one());
            acc += w / (delta * weighted_lp_norm(f, 2.0, WeightSpec::one()));
        }
        return acc / trials;
    };
    double v8 = value_at(0.125);
    double v16 = value_at(0.0625);
    CHECK(v16 <= 1.3 * v8);
}

TEST_CASE("convolution boundedness constant is stable over 20 random pairs") {
    GridSpec g(1, 256, 4.0);
    Window q = Window::cube(0.5);
    const double p = 2.0;
    std::vector<double> consts;
    for (int t = 0; t < 20; ++t) {
        auto f = random_band_limited(g, 1500 + t);
        auto h = random_band_limited(g, 1700 + t);
        auto fh = convolve(f, h);
        double lhs = wiener_norm(fh, q, p, WeightSpec::one());
        double rhs = wiener_norm(f, q, 1.0, WeightSpec::companion(0.0)) *
                     wiener_norm(h, q, p, WeightSpec::one());
        consts.push_back(lhs / rhs);
    }
    double mx = *std::max_element(consts.begin(), consts.end());
    CHECK(mx <= 10.0 * median(consts));
}

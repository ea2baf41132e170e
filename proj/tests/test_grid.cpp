#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "decospace/grid.hpp"
#include "decospace/testfields.hpp"

using namespace decospace;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double rel_l2_error(const SampledField& a, const SampledField& b) {
    auto sa = a.space();
    auto sb = b.space();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        num += std::norm(sa[i] - sb[i]);
        den += std::norm(sb[i]);
    }
    return std::sqrt(num / den);
}

SampledField constant_field(const GridSpec& g, cdouble c) {
    return SampledField::from_space(g, std::vector<cdouble>(g.size(), c));
}

} // namespace

TEST_CASE("discrete delta transforms to the constant-one spectrum") {
    GridSpec g(1, 64, 2.0);
    std::vector<cdouble> vals(g.size(), 0.0);
    // x = 0 sits at flat index n/2 (x_j = -L + j h).
    vals[g.n / 2] = 1.0 / g.h();
    auto f = SampledField::from_space(g, std::move(vals));
    for (cdouble v : f.freq()) {
        CHECK(std::abs(v - 1.0) < 1e-12);
    }
}

TEST_CASE("zero field transforms to zero") {
    GridSpec g(2, 16, 1.0);
    auto f = SampledField::zero(g);
    for (cdouble v : f.freq()) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("gaussian transform matches the closed form on d=1, n=1024, L=16") {
    GridSpec g(1, 1024, 16.0);
    auto f = PrototypeSpec::gaussian(1.0).sample_space(g);
    auto fr = f.freq();
    double sup = 0.0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        Point xi = g.freq_point(i);
        sup = std::max(sup, std::abs(fr[i] - std::exp(-kPi * xi[0] * xi[0])));
    }
    CHECK(sup <= 1e-8);
}

TEST_CASE("Parseval holds for random fields") {
    GridSpec g(1, 256, 4.0);
    auto f = random_band_limited(g, 3);
    double es = 0.0, ef = 0.0;
    for (cdouble v : f.space()) es += std::norm(v);
    for (cdouble v : f.freq()) ef += std::norm(v);
    es *= g.h();
    ef *= g.freq_step();
    CHECK(std::abs(es - ef) <= 1e-10 * es);
}

TEST_CASE("DFT round trip is exact to 1e-12") {
    GridSpec g(2, 32, 2.0);
    auto f = random_band_limited(g, 11);
    auto round = SampledField::from_freq(g, std::vector<cdouble>(f.freq().begin(), f.freq().end()));
    CHECK(rel_l2_error(round, f) <= 1e-12);
}

TEST_CASE("weighted L^p norm of the constant one on L=1 is sqrt(2)") {
    GridSpec g(1, 64, 1.0);
    auto f = constant_field(g, 1.0);
    CHECK(weighted_lp_norm(f, 2.0, WeightSpec::one()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sup norm of a constant is its modulus") {
    GridSpec g(1, 32, 3.0);
    auto f = constant_field(g, cdouble(3.0, -4.0));
    CHECK(weighted_lp_norm(f, kInf, WeightSpec::one()) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("bracket-weighted L^1 norm of the gaussian matches a dense trapezoid oracle") {
    GridSpec g(1, 4096, 16.0);
    auto f = PrototypeSpec::gaussian(1.0).sample_space(g);
    double got = weighted_lp_norm(f, 1.0, WeightSpec::bracket(2.0));

    // Independent oracle: trapezoid rule for int (1+x^2) e^{-pi x^2} dx.
    const int m = 1000000;
    const double a = -16.0, b = 16.0, step = (b - a) / m;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        double x = a + i * step;
        double v = (1.0 + x * x) * std::exp(-kPi * x * x);
        acc += (i == 0 || i == m) ? 0.5 * v : v;
    }
    acc *= step;
    CHECK(std::abs(got - acc) <= 1e-6 * acc);
}

TEST_CASE("weighted norms are absolutely homogeneous") {
    GridSpec g(1, 128, 4.0);
    auto f = random_band_limited(g, 5);
    std::vector<cdouble> scaled(f.space().begin(), f.space().end());
    cdouble c(1.7, -0.3);
    for (auto& v : scaled) v *= c;
    auto cf = SampledField::from_space(g, std::move(scaled));
    for (double p : {0.5, 1.0, 2.0, kInf}) {
        double n1 = weighted_lp_norm(cf, p, WeightSpec::bracket(1.0));
        double n2 = std::abs(c) * weighted_lp_norm(f, p, WeightSpec::bracket(1.0));
        CHECK(std::abs(n1 - n2) <= 1e-14 * n2);
    }
}

TEST_CASE("triangle and p-triangle inequalities hold on 100 random pairs") {
    GridSpec g(1, 128, 4.0);
    for (int t = 0; t < 100; ++t) {
        auto f = random_band_limited(g, 100 + t);
        auto h = random_band_limited(g, 300 + t);
        std::vector<cdouble> sum(g.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = f.space()[i] + h.space()[i];
        auto fh = SampledField::from_space(g, std::move(sum));
        for (double p : {1.0, 2.0, kInf}) {
            double lhs = weighted_lp_norm(fh, p, WeightSpec::one());
            double rhs = weighted_lp_norm(f, p, WeightSpec::one()) +
                         weighted_lp_norm(h, p, WeightSpec::one());
            CHECK(lhs <= rhs * (1.0 + 1e-12));
        }
        double p = 0.5;
        double lhs = std::pow(weighted_lp_norm(fh, p, WeightSpec::one()), p);
        double rhs = std::pow(weighted_lp_norm(f, p, WeightSpec::one()), p) +
                     std::pow(weighted_lp_norm(h, p, WeightSpec::one()), p);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("weighted_lp_norm rejects nonpositive p") {
    GridSpec g(1, 16, 1.0);
    auto f = constant_field(g, 1.0);
    CHECK_THROWS_AS((void)weighted_lp_norm(f, 0.0, WeightSpec::one()), config_error);
    CHECK_THROWS_AS((void)weighted_lp_norm(f, -1.0, WeightSpec::one()), config_error);
}

TEST_CASE("bracket weight is submultiplicative against its companion") {
    WeightSpec v = WeightSpec::bracket(1.5);
    WeightSpec v0 = WeightSpec::companion(1.5);
    for (double x : {-3.0, -0.5, 0.0, 1.0, 2.5}) {
        for (double y : {-2.0, -1.0, 0.25, 4.0}) {
            Point px{x, 0.0}, py{y, 0.0}, pxy{x + y, 0.0};
            CHECK(v(pxy, 1) <= v(px, 1) * v0(py, 1) * (1.0 + 1e-12));
            CHECK(v0(py, 1) >= 1.0);
            CHECK(v0(py, 1) == doctest::Approx(v0(Point{-y, 0.0}, 1)));
        }
    }
}

TEST_CASE("hat_derivative of the gaussian: alpha = 0 and alpha = 1 closed forms") {
    GridSpec g(1, 512, 8.0);
    auto gauss = PrototypeSpec::gaussian(1.0);

    auto d0 = hat_derivative(gauss, {0, 0}, g);
    auto d1 = hat_derivative(gauss, {1, 0}, g);
    auto s0 = d0.freq();
    auto s1 = d1.freq();
    for (std::size_t i = 0; i < s0.size(); ++i) {
        double xi = g.freq_point(i)[0];
        double base = std::exp(-kPi * xi * xi);
        CHECK(std::abs(s0[i] - base) <= 1e-10);
        CHECK(std::abs(s1[i] - (-2.0 * kPi * xi * base)) <= 1e-8);
    }
}

TEST_CASE("hat_derivative of the order-3 bspline matches finite differences of sinc^4") {
    auto bs = PrototypeSpec::bspline(3);
    auto sinc4 = [](double x) {
        if (x == 0.0) return 1.0;
        double s = std::sin(kPi * x) / (kPi * x);
        return s * s * s * s;
    };
    const double fd = 1e-3;
    for (double xi : {-2.3, -0.7, 0.1, 0.5, 1.9}) {
        cdouble got = bs.hat_derivative_at({2, 0}, Point{xi, 0.0}, 1);
        // Fourth-order central stencil for the second derivative.
        double oracle = (-sinc4(xi + 2.0 * fd) + 16.0 * sinc4(xi + fd) - 30.0 * sinc4(xi) +
                         16.0 * sinc4(xi - fd) - sinc4(xi - 2.0 * fd)) /
                        (12.0 * fd * fd);
        CHECK(std::abs(got - oracle) <= 1e-6);
    }
}

TEST_CASE("hat_derivative rejects orders over the cap") {
    GridSpec g(1, 64, 4.0);
    CHECK_THROWS_AS((void)hat_derivative(PrototypeSpec::gaussian(), {13, 0}, g), config_error);
}

TEST_CASE("modulate_dilate with identity map returns the prototype") {
    GridSpec g(1, 512, 8.0);
    auto gauss = PrototypeSpec::gaussian(1.0);
    auto f = modulate_dilate(gauss, 1.0, Point{0.0, 0.0}, Normalization::l1, g);
    auto ref = gauss.sample_space(g);
    CHECK(rel_l2_error(f, ref) <= 1e-12);
}

TEST_CASE("modulate_dilate T = 2 id doubles in space and halves in frequency") {
    GridSpec g(1, 1024, 16.0);
    auto gauss = PrototypeSpec::gaussian(1.0);
    auto f = modulate_dilate(gauss, 2.0, Point{0.0, 0.0}, Normalization::l1, g);
    auto sp = f.space();
    auto fr = f.freq();
    double sup_s = 0.0, sup_f = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        double x = g.point(i)[0];
        double xi = g.freq_point(i)[0];
        sup_s = std::max(sup_s, std::abs(sp[i] - 2.0 * std::exp(-kPi * 4.0 * x * x)));
        sup_f = std::max(sup_f, std::abs(fr[i] - std::exp(-kPi * xi * xi / 4.0)));
    }
    CHECK(sup_s <= 1e-10);
    CHECK(sup_f <= 1e-8);
}

TEST_CASE("l2-normalized modulate_dilate preserves the L2 norm") {
    GridSpec g(1, 2048, 16.0);
    auto gauss = PrototypeSpec::gaussian(1.0);
    auto f = modulate_dilate(gauss, 4.0, Point{8.0, 0.0}, Normalization::l2, g);
    double moved = weighted_lp_norm(f, 2.0, WeightSpec::one());
    double orig = weighted_lp_norm(gauss.sample_space(g), 2.0, WeightSpec::one());
    CHECK(std::abs(moved - orig) <= 1e-8 * orig);
}

TEST_CASE("modulate_dilate rejects a singular dilation") {
    GridSpec g(1, 64, 4.0);
    CHECK_THROWS_AS(
        (void)modulate_dilate(PrototypeSpec::gaussian(), 0.0, Point{0.0, 0.0}, Normalization::l1, g),
        config_error);
}

TEST_CASE("fourier_interpolate reproduces grid samples of band-limited fields") {
    GridSpec g(1, 128, 4.0);
    auto f = random_band_limited(g, 21);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < g.size(); i += 17) pts.push_back(g.point(i));
    auto vals = fourier_interpolate(f, pts);
    std::size_t j = 0;
    for (std::size_t i = 0; i < g.size(); i += 17) {
        CHECK(std::abs(vals[j++] - f.space()[i]) <= 1e-10);
    }
}

TEST_CASE("untrusted_spectral_fraction flags out-of-band content") {
    GridSpec g(1, 64, 1.0);
    CHECK(untrusted_spectral_fraction(random_band_limited(g, 2)) <= 1e-12);
    std::vector<cdouble> vals(g.size(), 0.0);
    vals[1] = 1.0; // near the negative Nyquist edge, far outside the trusted band
    auto bad = SampledField::from_freq(g, std::move(vals));
    CHECK(untrusted_spectral_fraction(bad) > 0.5);
    CHECK_THROWS_AS(require_band_limited(bad, "grid"), aliasing_error);
}

TEST_CASE("compact support flags are honest") {
    CHECK(PrototypeSpec::bspline(3).compactly_supported());
    CHECK(!PrototypeSpec::gaussian().compactly_supported());
    auto bs = PrototypeSpec::bspline(3);
    double radius = bs.support_radius();
    GridSpec g(1, 512, 8.0);
    auto sp = bs.sample_space(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.point(i)[0]) > radius + 1e-9) CHECK(std::abs(sp.space()[i]) <= 1e-14);
    }
}

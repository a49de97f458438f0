#include <doctest.h>

#include <cmath>
#include <random>

#include "isodt/cylinder.hpp"
#include "isodt/permute.hpp"

using namespace isodt;

namespace {

GridShape shape(int nx, int ny, double x0 = -2, double x1 = 2, int wraps = 1) {
    GridShape s;
    s.nx = nx;
    s.ny = ny;
    s.wraps = wraps;
    s.x0 = x0;
    s.x1 = x1;
    s.periodic_y = true;
    return s;
}

cyl::SectionParams params34() {
    cyl::SectionParams p;
    p.rho = 0.75;
    p.m0p = p.m1p = 1.0;
    return p;
}

cyl::SectionParams params_second() {
    cyl::SectionParams p;
    p.rho = 0.75;
    p.m0p = Complex(0, 1);
    p.m1p = Complex(0, -1);
    return p;
}

}  // namespace

TEST_CASE("chi of a right-scaled section is the constant scale") {
    const GridShape s = shape(17, 32, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const Quat q{0.7, -0.2, 1.1, 0.4};
    const SectionField phi2 = phi1 * q;
    const ChiField x = chi(fam, phi1, phi2);
    double worst = 0;
    for (const Quat& c : x.chi) worst = std::max(worst, (c - q).norm());
    CHECK(worst < 1e-12);
    CHECK(x.direction_mismatch < 1e-12);
}

TEST_CASE("chi directions agree for independent equal-parameter sections") {
    const GridShape s = shape(17, 48, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const SectionField phi2 = cyl::analytic_section(s, params_second()) * kJ;
    const ChiField x = chi(fam, phi1, phi2);
    CHECK(x.direction_mismatch < 1e-6);
}

TEST_CASE("chi satisfies the multiplier law across a period") {
    const GridShape s = shape(9, 64, -1, 1, 2);
    const ConnectionFamily fam = cyl::sampled_family(s);
    cyl::SectionParams p2;
    p2.rho = 0.25;
    p2.m0p = 1.0;  // plus branch only: multiplier -e^{i pi sqrt 2}
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const SectionField phi2 = cyl::analytic_section(s, p2);
    REQUIRE(phi1.multiplier.has_value());
    REQUIRE(phi2.multiplier.has_value());
    const ChiField x = chi(fam, phi1, phi2);
    const Quat h1inv = Quat::from_pair(1.0 / *phi1.multiplier, 0.0);
    const Quat h2 = Quat::from_pair(*phi2.multiplier, 0.0);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.ny; ++iy) {
            const Quat expected = h1inv * x.at(ix, iy) * h2;
            worst = std::max(worst, (x.at(ix, iy + s.ny) - expected).norm());
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("chi rejects sections whose differential vanishes") {
    const GridShape s = shape(9, 16, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi2 = cyl::analytic_section(s, params34());
    SectionField in_line = phi2;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const Quat f = cyl::point(s.xat(ix), s.yat(iy));
            in_line.vals[s.idx(ix, iy)] = HVec2{f, kOne};  // in L: eta phi = 0
        }
    CHECK_THROWS_AS((void)chi(fam, in_line, phi2), Error);
}

TEST_CASE("equal-parameter two-step lands in the line bundle and returns f") {
    const GridShape s = shape(17, 48, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const SectionField phi2 = cyl::analytic_section(s, params_second()) * kJ;
    const TwoStepResult ts = bianchi_two_step(fam, f, phi1, phi2);
    double in_l = 0, back = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const SectionSplit sp = split_section(ts.phi12.at(ix, iy), f.at(ix, iy));
            in_l = std::max(in_l, sp.alpha.norm() / ts.phi12.at(ix, iy).norm());
            back = std::max(back, (ts.f12.at(ix, iy) - f.at(ix, iy)).norm());
        }
    CHECK(in_l < 1e-10);
    CHECK(back < 1e-10);
}

TEST_CASE("two-step transform is symmetric in the two parameters") {
    const GridShape s = shape(33, 96, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    cyl::SectionParams p1 = params34();
    cyl::SectionParams p2 = params34();
    p2.rho = 2.0;
    const SectionField phi1 = cyl::analytic_section(s, p1);
    const SectionField phi2 = cyl::analytic_section(s, p2);
    const TwoStepResult a = bianchi_two_step(fam, f, phi1, phi2);
    const TwoStepResult b = bianchi_two_step(fam, f, phi2, phi1);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            worst = std::max(worst, (a.f12.at(ix, iy) - b.f12.at(ix, iy)).norm());
    CHECK(worst < 1e-6);
    // phi12 carries the second section's multiplier
    REQUIRE(a.phi12.multiplier.has_value());
    CHECK(std::abs(*a.phi12.multiplier - Complex(1, 0)) < 1e-12);
    // and is parallel for the dressed family of f1 at rho2
    const DarbouxResult r1 = darboux_transform(f, phi1, p1.rho);
    const DressedFamily dressed = dress_family(fam, r1);
    CHECK(parallelism_residual(dressed.family(), p2.rho, a.phi12) < 1e-6);
}

TEST_CASE("two-step enveloping precondition") {
    const GridShape s = shape(9, 24, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    SectionField phi2 = phi1;
    phi2.lambda = 2.0;  // same section mislabelled: f1 == f2 pointwise
    CHECK_THROWS_AS((void)bianchi_two_step(fam, f, phi1, phi2), Error);
}

TEST_CASE("bianchi-type section is the equal-parameter two-step section") {
    const GridShape s = shape(33, 96, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const SectionField phi2 = cyl::analytic_section(s, params_second()) * kJ;
    const SectionField proj = bianchi_type_section(phi2, f, phi1);
    const TwoStepResult ts = bianchi_two_step(fam, f, phi1, phi2);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            worst = std::max(worst, (proj.at(ix, iy) - ts.phi12.at(ix, iy)).norm() /
                                        proj.at(ix, iy).norm());
    CHECK(worst < 1e-9);

    // parallel for the transform's family
    const DarbouxResult r1 = darboux_transform(f, phi1, 0.75);
    const DressedFamily dressed = dress_family(fam, r1);
    CHECK(parallelism_residual(dressed.family(), 0.75, proj) < 1e-7);

    // a quaternionic multiple of phi1 has no component along L
    const SectionField dependent = phi1 * Quat{0.2, 0.5, -0.3, 0.8};
    CHECK_THROWS_AS((void)bianchi_type_section(dependent, f, phi1), Error);
}

TEST_CASE("cross-ratio of the permutability quad") {
    const GridShape s = shape(33, 64, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    cyl::SectionParams p1 = params34();
    cyl::SectionParams p2 = params34();
    p2.rho = 2.0;
    const SectionField phi1 = cyl::analytic_section(s, p1);
    const SectionField phi2 = cyl::analytic_section(s, p2);
    const DarbouxResult r1 = darboux_transform(f, phi1, p1.rho);
    const DarbouxResult r2 = darboux_transform(f, phi2, p2.rho);
    const TwoStepResult ts = bianchi_two_step(fam, f, phi1, phi2);
    const CrossRatioField cr = cross_ratio(f, r1.fhat, ts.f12, r2.fhat);
    const double target = p2.rho / p1.rho;  // 8/3
    double worst = 0;
    long valid = 0;
    for (long i = 0; i < s.size(); ++i) {
        if (!cr.valid[i]) continue;
        ++valid;
        worst = std::max(worst, std::abs(cr.cr[i].re() - target) + cr.cr[i].im().norm());
    }
    CHECK(valid == s.size());
    CHECK(worst < 1e-9);
}

TEST_CASE("cross-ratio is Moebius invariant") {
    const GridShape s = shape(9, 16, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    cyl::SectionParams p1 = params34();
    cyl::SectionParams p2 = params34();
    p2.rho = 2.0;
    const SectionField phi1 = cyl::analytic_section(s, p1);
    const SectionField phi2 = cyl::analytic_section(s, p2);
    const DarbouxResult r1 = darboux_transform(f, phi1, p1.rho);
    const DarbouxResult r2 = darboux_transform(f, phi2, p2.rho);
    const TwoStepResult ts = bianchi_two_step(fam, f, phi1, phi2);
    const CrossRatioField base = cross_ratio(f, r1.fhat, ts.f12, r2.fhat);

    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_quat = [&] { return Quat{u(rng), u(rng), u(rng), u(rng)}; };
    for (int trial = 0; trial < 3; ++trial) {
        const HEndo2 A{random_quat(), random_quat(), random_quat(), random_quat()};
        auto moebius = [&](const SurfaceGrid& g) {
            SurfaceGrid out = g;
            for (long i = 0; i < s.size(); ++i) {
                const HVec2 w = A * HVec2{g.f[i], kOne};
                out.f[i] = w.top * w.bottom.inv(w.norm());
            }
            return out;
        };
        const CrossRatioField moved =
            cross_ratio(moebius(f), moebius(r1.fhat), moebius(ts.f12), moebius(r2.fhat));
        double worst = 0;
        for (long i = 0; i < s.size(); ++i) {
            if (!base.valid[i] || !moved.valid[i]) continue;
            worst = std::max(worst, std::abs(base.cr[i].re() - moved.cr[i].re()) +
                                        std::abs(base.cr[i].im().norm() - moved.cr[i].im().norm()));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("equal parameters: the cross-ratio limit identity is 1") {
    // with f12 = f the quad gives cr = (f-f1)(f1-f)^{-1}(f-f2)(f2-f)^{-1} = 1
    const GridShape s = shape(9, 16, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const SectionField phi2 = cyl::analytic_section(s, params_second()) * kJ + phi1;
    const DarbouxResult r1 = darboux_transform(f, phi1, 0.75);
    const DarbouxResult r2 = darboux_transform(f, phi2, 0.75);
    const CrossRatioField cr = cross_ratio(f, r1.fhat, f, r2.fhat);
    double worst = 0;
    for (long i = 0; i < s.size(); ++i) {
        if (!cr.valid[i]) continue;
        worst = std::max(worst, (cr.cr[i] - kOne).norm());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("coincident points are masked") {
    const GridShape s = shape(9, 16, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const CrossRatioField cr = cross_ratio(f, f, f, f);
    for (long i = 0; i < s.size(); ++i) CHECK(cr.valid[i] == 0);
}

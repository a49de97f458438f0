#include <doctest.h>

#include <random>

#include "isodt/quaternion.hpp"

using namespace isodt;

namespace {
std::mt19937 rng(12345);
Quat random_quat(double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng), u(rng)};
}
Quat random_imaginary() {
    Quat q = random_quat();
    q.w = 0;
    return q;
}
}  // namespace

TEST_CASE("hamilton product defining relations") {
    CHECK((kI * kJ - kK).norm() == doctest::Approx(0));
    CHECK((kJ * kK - kI).norm() == doctest::Approx(0));
    CHECK((kK * kI - kJ).norm() == doctest::Approx(0));
    CHECK((kI * kI + kOne).norm() == doctest::Approx(0));
    CHECK((kJ * kJ + kOne).norm() == doctest::Approx(0));
    CHECK((kK * kK + kOne).norm() == doctest::Approx(0));
    CHECK((kI * kJ * kK + kOne).norm() == doctest::Approx(0));
}

TEST_CASE("product of imaginary quaternions is -<a,b> + a x b") {
    const Quat a = kI, b = kJ;
    const Quat ab = a * b;
    CHECK(ab.w == doctest::Approx(-dot(a, b)));
    CHECK((ab - kK).norm() == doctest::Approx(0));
    for (int it = 0; it < 50; ++it) {
        const Quat p = random_imaginary(), q = random_imaginary();
        const Quat pq = p * q;
        CHECK(pq.w == doctest::Approx(-dot(p, q)).epsilon(1e-12));
        // cross product components
        CHECK(pq.x == doctest::Approx(p.y * q.z - p.z * q.y).epsilon(1e-12));
        CHECK(pq.y == doctest::Approx(p.z * q.x - p.x * q.z).epsilon(1e-12));
        CHECK(pq.z == doctest::Approx(p.x * q.y - p.y * q.x).epsilon(1e-12));
    }
}

TEST_CASE("norm is multiplicative") {
    for (int it = 0; it < 200; ++it) {
        const Quat a = random_quat(), b = random_quat();
        CHECK((a * b).norm() == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
    }
}

TEST_CASE("imaginary anticommutator gives the inner product") {
    for (int it = 0; it < 100; ++it) {
        const Quat a = random_imaginary(), b = random_imaginary();
        const Quat s = a * b + b * a;
        CHECK(s.im().norm() == doctest::Approx(0).epsilon(1e-12));
        CHECK(s.w == doctest::Approx(-2.0 * dot(a, b)).epsilon(1e-12));
        // a imaginary: a^2 = -|a|^2
        const Quat sq = a * a;
        CHECK(sq.w == doctest::Approx(-a.norm2()).epsilon(1e-12));
        CHECK(sq.im().norm() == doctest::Approx(0));
    }
}

TEST_CASE("inverses") {
    CHECK((kOne.inv() - kOne).norm() == doctest::Approx(0));
    CHECK((kI.inv() + kI).norm() == doctest::Approx(0));
    const Quat onepi{1, 1, 0, 0};
    const Quat expect{0.5, -0.5, 0, 0};
    CHECK((onepi.inv() - expect).norm() == doctest::Approx(0));
    for (int it = 0; it < 50; ++it) {
        const Quat q = random_quat();
        if (q.norm() < 0.1) continue;
        CHECK((q * q.inv() - kOne).norm() == doctest::Approx(0).epsilon(1e-12));
    }
    CHECK_THROWS_AS((Quat{}.inv()), Error);
    CHECK_THROWS_AS((Quat{1e-15, 0, 0, 0}.inv()), Error);
}

TEST_CASE("endomorphism apply and inverse") {
    const HEndo2 id = HEndo2::identity();
    const HVec2 v{random_quat(), random_quat()};
    CHECK(((id * v) - v).norm() == doctest::Approx(0));

    const HEndo2 swap{Quat{}, kOne, Quat{}, Quat{}};
    const HVec2 w = swap * HVec2{Quat{}, random_quat()};
    CHECK(w.bottom.norm() == doctest::Approx(0));

    const HEndo2 diag{kJ, Quat{}, Quat{}, kK};
    const HEndo2 expect{-kJ, Quat{}, Quat{}, -kK};
    CHECK((endo_inv(diag) - expect).norm() == doctest::Approx(0).epsilon(1e-14));

    for (int it = 0; it < 25; ++it) {
        const HEndo2 A{random_quat(), random_quat(), random_quat(), random_quat()};
        HEndo2 Ainv;
        try {
            Ainv = endo_inv(A);
        } catch (const Error&) {
            continue;  // random matrix happened to be near-singular
        }
        CHECK((A * Ainv - HEndo2::identity()).norm() < 1e-12 * (1 + A.norm() * Ainv.norm()));
    }
    CHECK_THROWS_AS((endo_inv(HEndo2{kOne, kOne, kOne, kOne})), Error);
}

TEST_CASE("complexification is an algebra homomorphism") {
    CHECK((complexify(HEndo2::identity()) - ComplexMatrix4::Identity()).norm() ==
          doctest::Approx(0));
    for (int it = 0; it < 50; ++it) {
        const HEndo2 A{random_quat(), random_quat(), random_quat(), random_quat()};
        const HEndo2 B{random_quat(), random_quat(), random_quat(), random_quat()};
        const ComplexMatrix4 lhs = complexify(A * B);
        const ComplexMatrix4 rhs = complexify(A) * complexify(B);
        CHECK((lhs - rhs).norm() < 1e-12 * (1 + rhs.norm()));
        // round-trip
        CHECK((decomplexify(complexify(A)) - A).norm() == doctest::Approx(0));
    }
}

TEST_CASE("spectrum is conjugation-symmetric") {
    for (int it = 0; it < 20; ++it) {
        const HEndo2 A{random_quat(), random_quat(), random_quat(), random_quat()};
        Eigen::ComplexEigenSolver<ComplexMatrix4> es(complexify(A), false);
        std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
        // every eigenvalue's conjugate is also present
        for (Complex v : ev) {
            double best = 1e300;
            for (Complex w : ev) best = std::min(best, std::abs(std::conj(v) - w));
            CHECK(best < 1e-9 * (1 + std::abs(v)));
        }
    }
}

TEST_CASE("right multiplication by j flips the block spectrum") {
    const HEndo2 diag_j{kJ, Quat{}, Quat{}, kJ};
    Eigen::ComplexEigenSolver<ComplexMatrix4> es(complexify(diag_j), false);
    int plus = 0, minus = 0;
    for (int i = 0; i < 4; ++i) {
        const Complex v = es.eigenvalues()(i);
        if (std::abs(v - Complex(0, 1)) < 1e-12) ++plus;
        if (std::abs(v - Complex(0, -1)) < 1e-12) ++minus;
    }
    CHECK(plus == 2);
    CHECK(minus == 2);
}

TEST_CASE("complex pair view round-trips") {
    for (int it = 0; it < 20; ++it) {
        const Quat q = random_quat();
        CHECK((Quat::from_pair(q.ca(), q.cb()) - q).norm() == doctest::Approx(0));
        // right multiplication by i in the pair view
        const Quat qi = cmul_right(q, Complex(0, 1));
        CHECK((qi - q * kI).norm() == doctest::Approx(0).epsilon(1e-14));
    }
}

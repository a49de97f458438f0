#include "isodt/quaternion.hpp"

namespace isodt {

namespace {

// Left multiplication by q = a + j b as a 2x2 complex block acting on the
// complex-pair coordinates of a quaternion.
Eigen::Matrix2cd block(const Quat& q) {
    Eigen::Matrix2cd m;
    const Complex a = q.ca(), b = q.cb();
    m << a, -std::conj(b), b, std::conj(a);
    return m;
}

Quat unblock(const Eigen::Matrix2cd& m) {
    return Quat::from_pair(m(0, 0), m(1, 0));
}

}  // namespace

ComplexMatrix4 complexify(const HEndo2& A) {
    ComplexMatrix4 M;
    M.block<2, 2>(0, 0) = block(A.a);
    M.block<2, 2>(0, 2) = block(A.b);
    M.block<2, 2>(2, 0) = block(A.c);
    M.block<2, 2>(2, 2) = block(A.d);
    return M;
}

HEndo2 decomplexify(const ComplexMatrix4& M) {
    return {unblock(M.block<2, 2>(0, 0)), unblock(M.block<2, 2>(0, 2)),
            unblock(M.block<2, 2>(2, 0)), unblock(M.block<2, 2>(2, 2))};
}

ComplexVector4 complexify(const HVec2& v) {
    ComplexVector4 c;
    c << v.top.ca(), v.top.cb(), v.bottom.ca(), v.bottom.cb();
    return c;
}

HVec2 decomplexify(const ComplexVector4& v) {
    return {Quat::from_pair(v(0), v(1)), Quat::from_pair(v(2), v(3))};
}

HEndo2 endo_inv(const HEndo2& A, double eps) {
    const ComplexMatrix4 M = complexify(A);
    Eigen::FullPivLU<ComplexMatrix4> lu(M);
    lu.setThreshold(eps);
    if (!lu.isInvertible()) throw Error("singular quaternionic 2x2 matrix");
    const ComplexMatrix4 inv = lu.inverse();
    return decomplexify(inv);
}

}  // namespace isodt

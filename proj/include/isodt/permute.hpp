#pragma once

#include <vector>

#include "isodt/connection.hpp"
#include "isodt/darboux.hpp"
#include "isodt/quaternion.hpp"
#include "isodt/surface.hpp"

namespace isodt {

struct ChiField {
    GridShape shape;
    std::vector<Quat> chi;
    double direction_mismatch = 0;  // worst relative x/y disagreement

    const Quat& at(int ix, int iy) const { return chi[shape.idx(ix, iy)]; }
};

/// chi with d phi_2 = d phi_1 chi, computed per direction through the
/// parallelism identity d phi = -rho eta(X) phi (both values land in L, so
/// chi is the ratio of the bottom coefficients). The two directions are
/// averaged; a mismatch beyond abort_tol signals non-parallel input.
ChiField chi(const ConnectionFamily& fam, const SectionField& phi1, const SectionField& phi2,
             double abort_tol = 1e-3);

struct TwoStepResult {
    SectionField phi12;
    SurfaceGrid f12;
    std::vector<Quat> T_from_f1;  // f12 - f1 per sample
    double chi_mismatch = 0;
};

/// Algebraic permutability: phi12 = phi2 - phi1 chi, the common transform
/// f12 = phi12 H in the affine chart. Distinct parameters require the
/// enveloping condition f1 != f2 everywhere.
TwoStepResult bianchi_two_step(const ConnectionFamily& fam, const SurfaceGrid& f,
                               const SectionField& phi1, const SectionField& phi2);

/// Equal-parameter Bianchi section: the projection of phi2 onto L along
/// L1 = phi1 H; parallel for the transform's connection, transform = f.
SectionField bianchi_type_section(const SectionField& phi2, const SurfaceGrid& f,
                                  const SectionField& phi1);

struct CrossRatioField {
    GridShape shape;
    std::vector<Quat> cr;
    std::vector<unsigned char> valid;  // 0 where points coincide

    const Quat& at(int ix, int iy) const { return cr[shape.idx(ix, iy)]; }
};

/// Quaternionic cross-ratio (a-b)(b-c)^{-1}(c-d)(d-a)^{-1} per sample for
/// the permutability quad (f, f1, f12, f2). The similarity class is read
/// off as (real part, |imaginary part|).
CrossRatioField cross_ratio(const SurfaceGrid& f, const SurfaceGrid& f1, const SurfaceGrid& f12,
                            const SurfaceGrid& f2, double coincide_tol = 1e-12);

}  // namespace isodt

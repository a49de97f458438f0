#pragma once

#include <functional>
#include <vector>

#include "isodt/connection.hpp"
#include "isodt/quaternion.hpp"
#include "isodt/surface.hpp"

namespace isodt {

// Sample flags shared by transform results and section fields.
inline constexpr unsigned char kMaskTouching = 1;  // alpha ~ 0, transform meets f
inline constexpr unsigned char kMaskInfinity = 2;  // beta ~ 0, transform through infinity
inline constexpr double kSingularSampleTol = 1e-8;

/// Coefficients of phi = e alpha + psi beta against the affine frame of f.
struct SectionSplit {
    Quat alpha, beta;
};

/// Split against psi = (f, 1): alpha = top - f*bottom, beta = bottom.
SectionSplit split_section(const HVec2& phi, const Quat& f);
/// General split against an arbitrary psi with invertible bottom.
SectionSplit split_section(const HVec2& phi, const HVec2& psi);

struct DarbouxResult {
    SurfaceGrid base;            // the surface that was transformed
    SurfaceGrid fhat;            // f + T
    std::vector<Quat> T;         // alpha beta^{-1} per sample
    SectionField phi;            // generating section
    double rho = 0;
    std::vector<unsigned char> mask;  // kMaskTouching / kMaskInfinity
    bool returns_original = false;    // transform coincides with the base everywhere

    int singular_count() const;
};

/// One-step Darboux transform of f from a d_rho-parallel section. When a
/// family is supplied the parallelism of phi is spot-checked first.
DarbouxResult darboux_transform(const SurfaceGrid& f, const SectionField& phi, double rho,
                                const ConnectionFamily* fam = nullptr,
                                double parallel_tol = 1e-4);

/// max over samples and directions of |dT + df - T d(fd) rho T| (relative).
double riccati_residual(const SurfaceGrid& f, const SurfaceGrid& fd,
                        const std::vector<Quat>& T, double rho);

/// Mean curvature of f + T from the dual's curvature:
/// Hhat = -(H^d / rho - 2<T,N>) / |T|^2 per sample. Exact dual frames
/// (e.g. the omega samples of a retraction form) may be supplied.
std::vector<double> darboux_mean_curvature(const SurfaceGrid& f, const SurfaceGrid& fd,
                                           const std::vector<Quat>& T, double rho,
                                           const TangentField* fd_frames = nullptr,
                                           double conformal_tol = 1e-3);

/// Necessary CMC condition residual per sample:
/// max_X |(H - Hhat)<f_X, T> + (d_X H^d)/(2 rho)|.
std::vector<double> cmc_obstruction(const SurfaceGrid& f, const SurfaceGrid& fd,
                                    const std::vector<Quat>& T, double rho, double Hhat,
                                    const TangentField* fd_frames = nullptr,
                                    double conformal_tol = 1e-3);

/// Frames of the dual carried by a retraction form (its omega samples).
TangentField dual_frames(const RetractionForm& eta);

/// Simple factor dressing of the family by the splitting H^2 = Lhat + L:
/// r(lambda) = pihat + rho/(rho-lambda) pi carries d_lambda to the
/// transform's family, which equals d + lambda*etahat with
/// etahat = -pihat o d o pi / rho for every lambda (no pole).
class DressedFamily {
  public:
    /// Grid-backed: projections and etahat sampled from a transform result.
    static DressedFamily build(const ConnectionFamily& fam, const DarbouxResult& result);

    /// Analytic: exact section/surface evaluators (closed-form pipelines).
    struct AnalyticInput {
        GridShape shape;
        double rho = 0;
        int substeps = 4;
        std::function<HVec2(double, double)> phi1;        // generating section
        std::function<Quat(double, double)> f;            // base surface
        std::function<Quat(double, double, Dir)> df;      // its differential
    };
    static DressedFamily analytic(const AnalyticInput& in);

    const ConnectionFamily& family() const { return fam_; }
    double rho() const { return rho_; }
    const GridShape& shape() const { return fam_.eta.shape(); }

    HEndo2 pi(int ix, int iy) const { return pi_[shape().idx(ix, iy)]; }
    HEndo2 pihat(int ix, int iy) const { return pihat_[shape().idx(ix, iy)]; }
    /// Gauge r(lambda) at a sample; lambda != rho.
    HEndo2 gauge(int ix, int iy, double lambda) const;
    static double sigma(double rho, double lambda);

    const std::vector<double>& basis_condition() const { return cond_; }
    const std::vector<unsigned char>& mask() const { return mask_; }

  private:
    double rho_ = 0;
    ConnectionFamily fam_;
    std::vector<HEndo2> pi_, pihat_;
    std::vector<double> cond_;
    std::vector<unsigned char> mask_;
};

DressedFamily dress_family(const ConnectionFamily& fam, const DarbouxResult& result);

/// Integrates the bottom-left entry of eta (the dual differential) over
/// the grid, trapezoid rule, anchored at (x0, 0).
SurfaceGrid dual_from_form(const RetractionForm& eta, const Quat& anchor = Quat{});

}  // namespace isodt

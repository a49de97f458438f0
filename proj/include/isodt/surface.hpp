#pragma once

#include <vector>

#include "isodt/quaternion.hpp"

namespace isodt {

/// Node sampling of [x0,x1] x [0, 2*pi*wraps): nx nodes across x
/// (inclusive ends), ny nodes per y-period, rows() = ny*wraps total rows
/// with spacing 2*pi/ny. Row ny*wraps would coincide with row 0 for a
/// 2*pi-periodic field.
struct GridShape {
    int nx = 0;
    int ny = 0;
    int wraps = 1;
    double x0 = 0.0, x1 = 1.0;
    bool periodic_y = true;

    int rows() const { return ny * wraps; }
    long size() const { return static_cast<long>(nx) * rows(); }
    long idx(int ix, int iy) const { return static_cast<long>(ix) * rows() + iy; }
    double hx() const { return (x1 - x0) / (nx - 1); }
    double hy() const { return 2.0 * M_PI / ny; }
    double xat(int ix) const { return x0 + ix * hx(); }
    double yat(int iy) const { return iy * hy(); }
    bool same_sampling(const GridShape& o) const {
        return nx == o.nx && ny == o.ny && wraps == o.wraps &&
               std::abs(x0 - o.x0) < 1e-14 && std::abs(x1 - o.x1) < 1e-14;
    }
};

/// Sampled immersion f on a GridShape; values quaternionic, imaginary
/// when the surface lives in 3-space.
struct SurfaceGrid {
    GridShape shape;
    std::vector<Quat> f;

    const Quat& at(int ix, int iy) const { return f[shape.idx(ix, iy)]; }
    Quat& at(int ix, int iy) { return f[shape.idx(ix, iy)]; }

    double scale() const;                      // max |f|
    double max_real_part() const;              // R^3 check helper
    double periodicity_residual() const;       // row agreement across wraps
};

/// Partial derivatives per sample.
struct TangentField {
    GridShape shape;
    std::vector<Quat> fx, fy;
};

/// Derivatives of a sampled field along one grid direction. Centered
/// 4th-order stencils inside, 4th-order one-sided at x-boundaries,
/// periodic wrap in y when the shape is periodic. Grids with fewer than
/// five nodes in the direction fall back to 2nd order; fewer than four
/// is an error.
std::vector<Quat> diff_x(const GridShape& shape, const std::vector<Quat>& field, int order = 4);
std::vector<Quat> diff_y(const GridShape& shape, const std::vector<Quat>& field, int order = 4);
std::vector<double> diff_x(const GridShape& shape, const std::vector<double>& field, int order = 4);
std::vector<double> diff_y(const GridShape& shape, const std::vector<double>& field, int order = 4);

/// Discrete differential of an immersion; rejects grids that fail the
/// immersion bound |f_x|, |f_y| > eps at any sample.
TangentField discrete_diff(const SurfaceGrid& grid);

/// Unit imaginary N with f_y = N f_x (conformal orientation). Throws when
/// the frame is non-conformal beyond tol (relative).
Quat gauss_map_at(const Quat& fx, const Quat& fy, double tol = 1e-3);
std::vector<Quat> gauss_map(const SurfaceGrid& grid, double tol = 1e-3);
std::vector<Quat> gauss_map(const TangentField& frames, double tol = 1e-3);

/// Mean curvature per sample via -H df = (dN - N *dN)/2, discretised with
/// discrete_diff. Requires an R^3-valued conformal immersion. The frame
/// overload skips the first differentiation when exact frames are known.
std::vector<double> mean_curvature(const SurfaceGrid& grid);
std::vector<double> mean_curvature(const GridShape& shape, const TangentField& frames,
                                   double conformal_tol = 1e-3);

/// Integrates omega = f_x^{-1} dx - f_y^{-1} dy by the trapezoid rule,
/// row y=0 first, then up each column. The additive constant is the
/// caller-supplied anchor at (x0, 0). Throws when omega fails the
/// discrete closedness test (input not isothermic in these coordinates).
SurfaceGrid christoffel_dual(const SurfaceGrid& grid, const Quat& anchor = Quat{},
                             double closedness_tol = 1e-3);

/// max over samples of (| |fx|^2 - |fy|^2 | + |<fx,fy>|) / |fx|^2.
double conformality_residual(const SurfaceGrid& grid);

/// Discrete exterior derivative of the 1-form (wx dx + wy dy): max
/// plaquette circulation divided by plaquette area.
double closedness_residual(const GridShape& shape, const std::vector<Quat>& wx,
                           const std::vector<Quat>& wy);

/// max plaquette value of (wedge of omega and df)/area, the isothermic
/// compatibility omega ^ df = 0.
double wedge_residual(const SurfaceGrid& f, const SurfaceGrid& fd);

}  // namespace isodt

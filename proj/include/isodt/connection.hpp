#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isodt/quaternion.hpp"
#include "isodt/surface.hpp"

namespace isodt {

enum class Dir { X = 0, Y = 1 };

/// Endomorphism-valued 1-form eta with Im eta in L in ker eta; generates
/// the family d_lambda = d + lambda*eta. Backed either by per-sample
/// values of eta(dx), eta(dy) or by an analytic closure.
class RetractionForm {
  public:
    using Analytic = std::function<HEndo2(double x, double y, Dir dir)>;

    static RetractionForm from_samples(GridShape shape, std::vector<HEndo2> ex,
                                       std::vector<HEndo2> ey);
    /// eta(X) = [[f w(X), -f w(X) f], [w(X), -w(X) f]] with w = d(fd).
    static RetractionForm from_surfaces(const SurfaceGrid& f, const SurfaceGrid& fd);
    static RetractionForm analytic(GridShape shape, Analytic eval);

    const GridShape& shape() const { return shape_; }
    bool is_analytic() const { return static_cast<bool>(eval_); }

    /// Nodes per edge-interpolation window for sampled backings: 6
    /// (quintic, keeps RK4 order) by default; 2 gives the plain linear
    /// interpolation of the endpoint samples.
    int interpolation_points() const { return interp_points_; }
    void set_interpolation_points(int npts);

    HEndo2 at(int ix, int iy, Dir dir) const;
    /// Value at a point on a grid line: for Dir::X the row iy is fixed and
    /// x varies; for Dir::Y the column ix is fixed and y varies. Sampled
    /// backings interpolate with a cubic through the four nearest nodes
    /// (one-sided near the x-boundary) so edge transport keeps RK4 order.
    HEndo2 on_line(Dir dir, int fixed_index, double coord) const;

    /// Bottom-left entry of eta, the dual differential omega = d(fd).
    Quat omega(int ix, int iy, Dir dir) const { return at(ix, iy, dir).c; }

    /// max over samples and directions of |eta(X)^2| (relative) plus the
    /// kernel/image containment residuals against the line bundle of f.
    double structure_residual(const SurfaceGrid& f) const;

  private:
    GridShape shape_;
    std::vector<HEndo2> ex_, ey_;
    Analytic eval_;
    int interp_points_ = 6;
};

/// Associated family d_lambda = d + lambda*eta of an isothermic surface.
struct ConnectionFamily {
    RetractionForm eta;
    int substeps = 4;  // RK4 substeps per grid edge
};

ConnectionFamily make_family(const SurfaceGrid& f, const SurfaceGrid& fd, int substeps = 4);

/// Section of the trivial H^2 bundle over the (partially unrolled) cover,
/// sampled on the grid. Values are stored column-normalised: the true
/// section at (ix, iy) is vals[idx] * col_scale[ix]; the factor is the
/// seed-row norm recorded by integrate_section (1 for analytic fields).
/// The closure row holds the value at y = 2*pi*wraps per column.
struct SectionField {
    GridShape shape;
    double lambda = 0;
    std::vector<HVec2> vals;
    std::vector<double> col_scale;
    std::vector<HVec2> closure;
    std::optional<Complex> multiplier;
    std::vector<unsigned char> mask;  // optional per-sample flags

    HVec2 at(int ix, int iy) const { return vals[shape.idx(ix, iy)] * col_scale[ix]; }
    HVec2 closure_at(int ix) const { return closure[ix] * col_scale[ix]; }
    bool has_closure() const { return !closure.empty(); }

    SectionField operator*(const Quat& q) const;       // right scaling
    SectionField operator-(const SectionField&) const;
    SectionField operator+(const SectionField&) const;
};

/// One grid-edge parallel transport for d_lambda, from node (ix,iy) one
/// step along dir (backward when forward=false). Classical RK4 with the
/// family's substep count.
HVec2 transport_edge(const ConnectionFamily& fam, double lambda, const HVec2& start,
                     int ix, int iy, Dir dir, bool forward = true, int substeps_override = 0);
HEndo2 transport_edge_endo(const ConnectionFamily& fam, double lambda, int ix, int iy, Dir dir,
                           bool forward = true, int substeps_override = 0);

struct PathStep {
    Dir dir;
    int sign;  // +1 or -1
};

/// Transport along a path of grid edges starting at (ix, iy).
HVec2 parallel_transport(const ConnectionFamily& fam, double lambda, const HVec2& start,
                         int ix, int iy, const std::vector<PathStep>& path);

enum class IntegrationOrder { RowThenColumns, ColumnsThenRow };

/// Global d_lambda-parallel field from a seed at (x0, 0): transports the
/// seed along the row y=0, then up each column (flatness makes the result
/// path-independent up to discretisation error). Deterministic order.
SectionField integrate_section(const ConnectionFamily& fam, double lambda, const HVec2& seed,
                               IntegrationOrder order = IntegrationOrder::RowThenColumns);

/// max over edges of the re-transport defect |phi(B) - T_fine(phi(A))| /
/// |phi(B)|, T_fine using refine x substeps.
double parallelism_residual(const ConnectionFamily& fam, double lambda,
                            const SectionField& phi, int refine = 4);

/// max over plaquettes of |T_up(T_right .) - T_right(T_up .)| / area; zero
/// for a flat connection up to discretisation.
double curvature_residual(const ConnectionFamily& fam, double lambda);

/// 2nd-order discrete curvature of d + lambda eta: trapezoid circulation
/// of lambda*eta plus the averaged wedge term, per unit plaquette area.
/// Converges at O(h^2); curvature_residual above is transport-based and
/// far more accurate, so order studies use this form.
double curvature_form_residual(const ConnectionFamily& fam, double lambda);

/// Transport of the identity frame once around y in [0, 2*pi] at the grid
/// column nearest to x.
HEndo2 holonomy(const ConnectionFamily& fam, double lambda, double x);

struct MultiplierPair {
    Complex h;              // representative, Im h >= 0
    int multiplicity = 0;   // complex multiplicity of the cluster
    HVec2 seed;             // eigensection seed (unit), valid when not defective
};

struct MultiplierSet {
    std::vector<MultiplierPair> pairs;  // conjugates merged; real pairs ascending
    bool defective = false;             // Jordan structure present
    bool ill_conditioned = false;
    HEndo2 hol;
    std::vector<Complex> raw_eigenvalues;
};

MultiplierSet multipliers(const ConnectionFamily& fam, double lambda, double x = 0.0);

enum class SpectrumClass { DefectiveReal, TwoReal, CirclePair, Resonance, FourDistinct };

std::string to_string(SpectrumClass c);

struct SpectrumRecord {
    SpectrumClass cls;
    Complex h1, h2;        // representatives (h2 meaningful for 2+ clusters)
    bool defective = false;
    bool ill_conditioned = false;
    int eigenspace_rank = 0;  // rank of (H - h1 I) for single-cluster spectra
};

SpectrumRecord classify_spectrum(const ConnectionFamily& fam, double lambda, double x = 0.0);

/// Least-squares complex multiplier estimate h with end = start*h plus the
/// relative closure residual.
std::pair<Complex, double> multiplier_fit(const HVec2& start, const HVec2& end);

/// Measures phi(x, 2*pi*w) = phi(x, 0) * h^w columnwise; returns the fitted
/// h (first period) and the worst relative residual.
std::pair<Complex, double> section_multiplier(const ConnectionFamily& fam, const SectionField& phi);

}  // namespace isodt

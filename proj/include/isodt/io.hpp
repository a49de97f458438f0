#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isodt/surface.hpp"

namespace isodt {

/// Grid CSV: one header block (nx, ny, wraps, x0, x1, periodic_y), then
/// rows "ix,iy,w,x,y,z" with full double round-trip formatting.
void write_grid_csv(const std::string& path, const SurfaceGrid& grid);
SurfaceGrid read_grid_csv(const std::string& path);

/// OBJ export of an R^3 grid: nx*(ny*wraps) vertices (9 significant
/// digits), quad faces, the y-seam welded only when the grid closes
/// within weld_tol. Samples flagged in mask are still emitted but listed
/// in a sidecar "<path>.mask" file as "ix,iy,flag" lines.
void write_obj(const std::string& path, const SurfaceGrid& grid,
               const std::vector<unsigned char>* mask = nullptr, double weld_tol = 1e-6);

/// Plain key-value sidecar, one "key = value" per line, insertion order.
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

std::string format_full(double v);   // round-trip double
std::string format_mesh(double v);   // 9 significant digits

}  // namespace isodt

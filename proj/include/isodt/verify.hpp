#pragma once

#include <string>
#include <vector>

namespace isodt {

struct VerifyOptions {
    int nx = 256;
    int ny = 512;
    double x0 = -2.0, x1 = 2.0;
    int scan_steps = 500;
    bool inject_eta_perturbation = false;  // test hook: breaks flatness on purpose
    bool include_invariants = true;        // module invariants beyond the criteria
};

struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    double value = 0;      // measured
    double tolerance = 0;  // effective bound (0 when not threshold-shaped)
    std::string note;
};

/// Runs the acceptance criteria (ids C1..C9) and, optionally, extra
/// module invariants. Tolerances are pinned at the 256x512 reference
/// grid; coarser grids scale the discretisation-limited bounds by the
/// appropriate power of the mesh ratio.
std::vector<CheckResult> run_checks(const VerifyOptions& opt);

int count_failures(const std::vector<CheckResult>& results);
std::string render_report(const std::vector<CheckResult>& results);
std::string render_json(const std::vector<CheckResult>& results);

}  // namespace isodt

#ifndef GOI_REGULARITY_HPP
#define GOI_REGULARITY_HPP

#include "goi/phase.hpp"

namespace goi {

enum class RegionStatus { Degenerate, InvertibleHere, SlowScaleInvertibleHere };
const char* region_status_name(RegionStatus s);

struct RegionVerdict {
    std::vector<double> point;
    std::array<double, 4> dir{};
    RegionStatus status = RegionStatus::Degenerate;
    int level = -1;      // first shrink level that passed, -1 when none did
    double exponent = 0; // strictly-nonzero exponent r, or the fitted slope
};

// Nested neighborhoods: box radius and cone half-angle both halve per level.
struct ShrinkSchedule {
    double radius0 = 0.5;
    double half_angle0 = 0.5236; // 30 degrees
    int levels = 5;
};

// For each lattice point and direction, classifies the net
// eps |-> inf over U x Gamma of |grad_xi phi_eps(y, xi/|xi|)|^2 on shrinking
// neighborhoods; the verdict is taken at the first level whose inf-net is
// strictly nonzero (slow-scale strictly nonzero upgrades the status). The
// inf is a lattice estimate, so Degenerate verdicts are conservative.
std::vector<RegionVerdict> detect_regions(const PhaseExpr& phi,
                                          const std::vector<std::vector<double>>& points,
                                          const std::vector<std::array<double, 4>>& dirs,
                                          const EpsilonGrid& grid,
                                          const ShrinkSchedule& sched = {},
                                          const ClassifyConfig& cfg = {});

// worst status over the direction block of each point (verdicts are returned
// point-major by detect_regions)
std::vector<RegionStatus> region_mask(const std::vector<RegionVerdict>& verdicts,
                                      std::size_t n_dirs);

// Conic sample set: (base point, theta direction) pairs standing in for a
// closed conic subset of Omega x R^p \ 0.
struct ConicSet {
    std::vector<std::pair<std::vector<double>, std::array<double, 4>>> items;
};

enum class WfMode { G, Ginf };

// Degenerate cells of a verdict table (mode G: not invertible; mode Ginf:
// not slow-scale invertible), fattened by one lattice cell in the point
// coordinates and one angular step in the direction.
ConicSet degenerate_cone(const std::vector<RegionVerdict>& verdicts, WfMode mode);

struct WSetVerdict {
    bool excluded = false;
    bool empty_v = false; // no V pair met the shrinking neighborhood: vacuous
    int level = -1;
    double exponent = 0;
};

// Tests whether (x0, xi0) escapes the wave-front bound set: the net
// eps |-> inf over y in U(x0), xi^ in Gamma(xi0), (y, theta^) in V, t in (0,1)
// of |t xi^ - (1-t) grad_y phi_eps(y, theta^)| (the joint homogeneity in
// (|xi|, |theta|) is factored out through t = |xi| / (|xi| + |theta|)).
// Excluded iff the net is strictly nonzero (mode G) / slow-scale strictly
// nonzero (mode Ginf) for some shrink level; an empty V is vacuously excluded.
WSetVerdict w_set_probe(const PhaseExpr& phi, const ConicSet& V, const std::vector<double>& x0,
                        const std::vector<double>& xi0_dir, WfMode mode, const EpsilonGrid& grid,
                        const ShrinkSchedule& sched = {}, const ClassifyConfig& cfg = {});

// Uniformly sampled kernel representative per epsilon on a box; axis sample
// counts must be powers of two.
struct SampledKernel {
    std::vector<double> eps_list;
    std::vector<std::array<double, 2>> box;
    std::vector<std::size_t> shape;
    std::vector<std::vector<cx>> values; // [eps][row-major grid]
};

struct WfEstimateConfig {
    double cutoff_width = 0.5; // support radius of the window around x0
    double half_angle = 0.3;   // cone around the tested direction
    int shell_min = 3, shell_max = 6;
    double lambda = 0.5;  // decay template |xi|^{-l(1-lambda)}
    double l_max = 8;     // decay order that counts as rapid
    double n_spread = 0.3; // Ginf gate: max spread of per-shell eps exponents
};

struct WfPoint {
    std::vector<double> x0;
    std::vector<double> dir;
    WfMode mode = WfMode::G;
    bool excluded = false;
    bool negligible = false;     // window kills the kernel at every tail eps
    std::vector<double> shell_n; // fitted eps exponent per dyadic shell
    std::vector<double> l_eff;   // achieved decay order per tail eps
    double spread = 0;
};

// Windows the kernel around x0 with a smooth bump, transforms it, and fits
// the localized spectrum against c * eps^-N * <xi>^{-l(1-lambda)} over the
// dyadic shells inside the cone. Mode G excludes when every tail eps shows
// decay order >= l_max (each eps may use its own N); mode Ginf additionally
// demands the per-shell eps exponents agree within n_spread.
WfPoint estimate_wf(const SampledKernel& kernel, const std::vector<double>& x0,
                    const std::vector<double>& dir, WfMode mode,
                    const WfEstimateConfig& cfg = {});

} // namespace goi

#endif

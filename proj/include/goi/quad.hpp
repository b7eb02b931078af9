#ifndef GOI_QUAD_HPP
#define GOI_QUAD_HPP

#include <utility>
#include <vector>

namespace goi {

// Gauss-Legendre nodes/weights on [-1,1]. Cached; n in [1, 64].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

struct Panel1D {
    double a, b;
    int nodes;
};

// Split [a,b] into equal panels so that osc_rate * panel_width stays below
// what `nodes` Gauss points resolve (1 radian per point keeps the phase
// error well under 1e-12). Returns at least one panel.
std::vector<Panel1D> oscillation_panels(double a, double b, double osc_rate, int nodes = 16);

// Flattened node/weight list for a list of panels.
void panel_nodes(const std::vector<Panel1D>& panels, std::vector<double>& xs,
                 std::vector<double>& ws);

} // namespace goi

#endif

#ifndef GOI_NET_HPP
#define GOI_NET_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goi/errors.hpp"

namespace goi {

// Strictly decreasing epsilon samples in (0,1], at least 8 points spanning
// three decades. The tail (smallest half, capped at 9 points) is where all
// asymptotic fits happen.
struct EpsilonGrid {
    std::vector<double> samples;

    static EpsilonGrid dyadic(int j_min = 3, int j_max = 20);
    void validate() const; // throws errc::config on violation
    std::span<const double> tail() const;
};

// One representative of a generalized number: eps |-> value. Must be pure.
using EpsilonNet = std::function<std::complex<double>(double)>;

struct ValuationEstimate {
    double slope = 0;   // |u_eps| = O(eps^slope); +inf sentinel for the zero net
    double residual = 0;
    bool monotone_tail = false;
};

enum class NetTag { Negligible, Moderate, SlowScale, NotModerate };

const char* net_tag_name(NetTag t);

struct NetClass {
    NetTag tag = NetTag::Moderate;
    int moderate_n = 0;                    // |u_eps| <= c*eps^{-N} (when applicable)
    std::optional<int> strictly_nonzero;   // r with |u_eps| >= eps^r on the tail
    bool slow_scale_strictly_nonzero = false;
    bool marginal = false;                 // slope near a decision threshold
    double slope = 0;
    double growth_exponent = 0;            // gamma in |u| ~ polylog * eps^{-gamma}
};

struct ClassifyConfig {
    double negligible_order = 10;
    int q_max = 20;
    int l_max = 40;
    double slow_scale_ratio = 0.1;
    double marginal_band = 0.05;
};

ValuationEstimate estimate_valuation(const EpsilonNet& net, const EpsilonGrid& grid);

NetClass classify_net(const EpsilonNet& net, const EpsilonGrid& grid,
                      const ClassifyConfig& cfg = {});

// Smallest integer r >= -slope with |u_eps| >= eps^r at every tail sample;
// nullopt when |u| decays faster than every power.
std::optional<int> is_strictly_nonzero(const EpsilonNet& net, const EpsilonGrid& grid);

// True iff 1/|u_eps| is a slow scale net on the tail. ZeroSample on |u|=0.
bool is_slow_scale_strictly_nonzero(const EpsilonNet& net, const EpsilonGrid& grid,
                                    const ClassifyConfig& cfg = {});

// e^{-slope}; the +inf sentinel maps to 0.
double ultra_pseudo_norm(const ValuationEstimate& v);

namespace detail {
// Least-squares fit log|u| = alpha + beta*log(log(1/eps)) + gamma*log(1/eps)
// over the given samples. Separates slow-scale (polylog) growth from genuine
// powers of 1/eps; gamma is the polynomial growth exponent.
struct GrowthFit {
    double alpha = 0, beta = 0, gamma = 0;
    bool all_zero = false;
};
GrowthFit fit_growth(std::span<const double> eps, std::span<const double> absu);
} // namespace detail

} // namespace goi

#endif

#ifndef GOI_HYPERBOLIC_HPP
#define GOI_HYPERBOLIC_HPP

#include "goi/fio.hpp"
#include "goi/regularity.hpp"

namespace goi {

// dt u + c(x,t) dx u + b(x,t) u = 0, u(x,0) = g(x). Coefficients are
// expressions over x1 (space), x2 (time) and eps; the datum over y1 and eps.
struct CauchyProblem {
    Expr c;
    Expr b;
    Expr g;
    std::array<double, 2> support{-1, 1}; // x-interval containing supp g
    std::array<double, 2> x_box{-2, 2};
    std::array<double, 2> t_box{0, 1};
};

// Backward characteristics of one representative: gamma(x,t;s) solves
// d/ds gamma = c(gamma, s) with gamma(x,t;t) = x, by adaptive 4th-order
// stepping with local error <= tol per step.
class CharacteristicFlow {
  public:
    CharacteristicFlow(const CauchyProblem& p, double eps, double tol = 1e-10);

    double gamma(double x, double t, double s) const;
    // gamma(x,t;0) together with int_0^t b(gamma(x,t;r), r) dr
    std::array<double, 2> foot_and_damping(double x, double t) const;
    double eps() const { return eps_; }
    double tol() const { return tol_; }

  private:
    std::array<double, 2> integrate(double x, double t, double s, bool with_b) const;
    Tape c_, b_;
    double eps_, tol_;
};

CharacteristicFlow solve_characteristics(const CauchyProblem& p, double eps, double tol = 1e-10);

// u(x,t) = g(gamma(x,t;0)) exp(-int_0^t b), sampled on xs x ts ([t][x] order).
std::vector<cx> solve_transport(const CauchyProblem& p, const CharacteristicFlow& flow,
                                std::span<const double> xs, std::span<const double> ts);

// Same solution through the operator route: for each (x,t) the representation
// int e^{i (gamma(x,t;0) - y) xi} e^{-int b} g(y) dy dxi / 2pi is a translation
// operator evaluated at the characteristic foot, so one regularized kernel
// serves the whole grid. Sampled [t][x].
std::vector<cx> fio_solution(const CauchyProblem& p, const CharacteristicFlow& flow,
                             std::span<const double> xs, std::span<const double> ts, int k = 3,
                             const QuadConfig& quad = {});

// 1-d cluster centers: sorted samples split at gaps wider than merge_dist.
std::vector<double> cluster_points(std::vector<double> samples, double merge_dist);

struct DependenceReport {
    std::array<double, 2> hull{};
    std::vector<double> clusters;
    std::vector<double> samples; // gamma_eps(x0,t0;0) over the grid tail
    bool settled = false;        // clusters stable under dropping the largest eps half
};

// Accumulation structure of the backward-characteristic feet over the eps tail.
DependenceReport domain_of_dependence(const CauchyProblem& p, double x0, double t0,
                                      const EpsilonGrid& grid, double tol = 1e-10,
                                      double merge_dist = 0.05);

// Cluster values of the coefficient net eps -> c_eps(x,t) over the grid tail.
std::vector<double> coefficient_clusters(const CauchyProblem& p, double x, double t,
                                         const EpsilonGrid& grid, double merge_dist = 0.05);

struct WfPredictedFamily {
    double c_value = 0;
    std::array<double, 3> dir{}; // unit (1, -c, -1)/sqrt(2 + c^2); antipode implied
};

// Predicted kernel wave-front directions, one family per coefficient cluster.
std::vector<WfPredictedFamily> kernel_wf_prediction(std::span<const double> c_clusters);

// angle (radians) between dir and the nearest predicted direction or antipode
double angle_to_prediction(std::span<const WfPredictedFamily> families,
                           std::span<const double> dir3);

// Kernel representative K_eps(x,t,y) = e^{-int b} * (1/pi) int_0^R
// cos((gamma(x,t;0)-y) xi) e^{-(eps xi)^2} d xi on a 3-d grid (cell centers),
// the frequency damping at scale 1/eps standing in for the delta kernel of
// the transport operator. shape entries must be powers of two.
SampledKernel sample_kernel(const CauchyProblem& p, std::span<const double> eps_list,
                            const std::vector<std::array<double, 2>>& box,
                            const std::vector<std::size_t>& shape, double tol = 1e-10);

} // namespace goi

#endif

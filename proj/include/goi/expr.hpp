#ifndef GOI_EXPR_HPP
#define GOI_EXPR_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "goi/errors.hpp"

namespace goi {

using cx = std::complex<double>;

// Evaluation point. Fixed-size coordinate blocks keep Point trivially
// copyable; dimensions above 4 are not needed anywhere in this library.
struct Point {
    double eps = 1.0;
    std::array<double, 4> x{};
    std::array<double, 4> y{};
    std::array<double, 4> xi{};
};

enum class Axis : std::uint8_t { X = 0, Y = 1, Xi = 2 };

// Dimensions an expression may reference. 0 disables an axis.
struct Arity {
    int nx = 0;
    int ny = 0;
    int np = 0; // xi dimension
    bool allow_eps = true;
};

// Immutable expression handle into a global hash-consed DAG. Expressions are
// closed under exact differentiation; identical subtrees share one node, and
// derivatives are memoized per node. All construction paths are serialized;
// evaluation happens through Tape, which copies what it needs and is
// lock-free afterwards.
class Expr {
public:
    Expr() : id_(0) {} // the constant 0

    static Expr constant(cx v);
    static Expr constant(double v) { return constant(cx(v, 0)); }
    static Expr eps();
    static Expr var(Axis a, int index);
    // eps-dependent scalar with zero spatial derivatives (generalized
    // constants, e.g. characteristic endpoints per epsilon)
    static Expr net_const(std::function<cx(double)> f);

    friend Expr operator+(Expr a, Expr b);
    friend Expr operator-(Expr a, Expr b);
    friend Expr operator*(Expr a, Expr b);
    friend Expr operator/(Expr a, Expr b);
    friend Expr operator-(Expr a);

    Expr pow(int n) const;          // integer power
    Expr powr(double r) const;      // real power, principal branch

    // exact partial derivative; memoized
    Expr d(Axis a, int index) const;
    // substitute each Var(axis,index) present in the map
    Expr subst(const std::map<std::pair<Axis, int>, Expr>& m) const;

    bool is_zero() const;
    bool is_one() const;
    bool same(Expr other) const { return id_ == other.id_; }

    std::uint32_t id() const { return id_; }
    static Expr from_id(std::uint32_t id);

private:
    explicit Expr(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;
    friend class Tape;
};

Expr exp(Expr e);
Expr log(Expr e);
Expr sin(Expr e);
Expr cos(Expr e);
// t <= 0 -> 0, else exp(-1/t); the C-infinity glue for cutoffs and bumps
Expr posexp(Expr e);
// max(t, 0)^n: C^{n-1} piecewise-polynomial glue; derivatives stay tame,
// unlike the essentially-singular layers of posexp-based bumps
Expr pospow(Expr e, int n);
Expr floor_of(Expr e);

inline Expr operator+(Expr a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, Expr b) { return Expr::constant(a) + b; }
inline Expr operator-(Expr a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, Expr b) { return Expr::constant(a) - b; }
inline Expr operator*(Expr a, double b) { return a * Expr::constant(b); }
inline Expr operator*(double a, Expr b) { return Expr::constant(a) * b; }
inline Expr operator/(Expr a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, Expr b) { return Expr::constant(a) / b; }

// |xi|^2, |xi|, <xi> = sqrt(1+|xi|^2) over the first p xi-coordinates
Expr xi_norm_sq(int p);
Expr xi_norm(int p);
Expr xi_bracket(int p);

// monotone C-infinity step: 0 for t<=0, 1 for t>=1
Expr smoothstep01(Expr t);
// posexp(1 - t^2): C-infinity bump supported in |t| < 1 (unnormalized)
Expr bump(Expr t);
// pospow(1 - t^2, n): spline bump supported in |t| < 1, value 1 at t = 0
Expr spline_bump(Expr t, int n = 12);
// mass of bump(): int_{-1}^{1} exp(-1/(1-t^2)) dt, frozen reference value
inline constexpr double bump_mass = 0.44399381616807865;
// radial cutoff chi(xi): 1 for |xi| < 1/4, 0 for |xi| > 1/2
Expr chi_cutoff(int p);

// Compiled evaluation schedule for one or more roots over the shared DAG.
class Tape {
public:
    explicit Tape(Expr root) : Tape(std::span<const Expr>(&root, 1)) {}
    explicit Tape(std::span<const Expr> roots);

    std::size_t root_count() const { return roots_.size(); }
    std::size_t size() const { return entries_.size(); }

    cx eval(const Point& p) const; // first root only
    void eval_multi(const Point& p, std::span<cx> out) const;
    // out is row-major: out[i * root_count() + r]
    void eval_batch(std::span<const Point> pts, std::span<cx> out) const;

private:
    struct Entry {
        std::uint8_t op;
        std::uint8_t axis;
        std::uint16_t idx;
        int ipow;
        double rpow;
        cx cval;
        std::shared_ptr<const std::function<cx(double)>> net;
        std::uint32_t kid_off;
        std::uint32_t kid_cnt;
    };
    std::vector<Entry> entries_;
    std::vector<std::uint32_t> kids_;
    std::vector<std::uint32_t> roots_; // slot of each root
    void run(const Point& p, std::vector<cx>& slots) const;
};

// number of interned nodes (diagnostics/tests)
std::size_t expr_arena_size();

} // namespace goi

#endif

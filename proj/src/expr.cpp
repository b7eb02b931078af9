#include "goi/expr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace goi {

namespace {

enum class Op : std::uint8_t {
    Const, Eps, Var, Add, Mul, PowInt, PowReal, Exp, Log, Sin, Cos, PosExp, PosPow, Floor,
    NetConst
};

using Id = std::uint32_t;

struct Node {
    Op op = Op::Const;
    Axis axis = Axis::X;
    std::uint16_t idx = 0;
    int ipow = 0;
    double rpow = 0;
    cx cval{};
    std::shared_ptr<const std::function<cx(double)>> net;
    std::vector<Id> kids;
    std::size_t hash = 0;
};

std::size_t hash_mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

std::size_t node_hash(const Node& n) {
    std::size_t h = static_cast<std::size_t>(n.op);
    h = hash_mix(h, static_cast<std::size_t>(n.axis));
    h = hash_mix(h, n.idx);
    h = hash_mix(h, static_cast<std::size_t>(n.ipow));
    h = hash_mix(h, std::hash<double>{}(n.rpow));
    h = hash_mix(h, std::hash<double>{}(n.cval.real()));
    h = hash_mix(h, std::hash<double>{}(n.cval.imag()));
    h = hash_mix(h, std::hash<const void*>{}(n.net.get()));
    for (Id k : n.kids) h = hash_mix(h, k);
    return h;
}

bool node_eq(const Node& a, const Node& b) {
    return a.op == b.op && a.axis == b.axis && a.idx == b.idx && a.ipow == b.ipow &&
           a.rpow == b.rpow && a.cval == b.cval && a.net == b.net && a.kids == b.kids;
}

struct Arena {
    std::recursive_mutex mu;
    std::deque<Node> nodes;
    std::unordered_multimap<std::size_t, Id> lookup;
    std::unordered_map<std::uint64_t, Id> deriv_memo; // (id, axis, idx) -> id

    Arena() {
        Node zero;
        zero.op = Op::Const;
        zero.cval = cx(0, 0);
        zero.hash = node_hash(zero);
        nodes.push_back(zero);
        lookup.emplace(zero.hash, 0);
    }

    Id intern(Node n) {
        n.hash = node_hash(n);
        auto [lo, hi] = lookup.equal_range(n.hash);
        for (auto it = lo; it != hi; ++it)
            if (node_eq(nodes[it->second], n)) return it->second;
        Id id = static_cast<Id>(nodes.size());
        lookup.emplace(n.hash, id);
        nodes.push_back(std::move(n));
        return id;
    }
};

Arena& arena() {
    static Arena* a = new Arena; // leaked on purpose: expressions live process-long
    return *a;
}

const Node& node(Id id) { return arena().nodes[id]; }

bool is_const(Id id) { return node(id).op == Op::Const; }
bool is_const_val(Id id, cx v) { return is_const(id) && node(id).cval == v; }

Id make_const(cx v) {
    Node n;
    n.op = Op::Const;
    n.cval = v;
    return arena().intern(std::move(n));
}

Id make_add(std::vector<Id> kids);
Id make_mul(std::vector<Id> kids);
Id make_powint(Id e, int p);
Id make_powr(Id e, double r);
Id make_unary(Op op, Id e);

Id make_add(std::vector<Id> kids) {
    std::vector<Id> flat;
    cx acc(0, 0);
    for (Id k : kids) {
        const Node& kn = node(k);
        if (kn.op == Op::Add) {
            for (Id kk : kn.kids) {
                if (is_const(kk)) acc += node(kk).cval;
                else flat.push_back(kk);
            }
        } else if (kn.op == Op::Const) {
            acc += kn.cval;
        } else {
            flat.push_back(k);
        }
    }
    if (acc != cx(0, 0)) flat.push_back(make_const(acc));
    if (flat.empty()) return make_const(cx(0, 0));
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end());
    Node n;
    n.op = Op::Add;
    n.kids = std::move(flat);
    return arena().intern(std::move(n));
}

Id make_mul(std::vector<Id> kids) {
    std::vector<Id> flat;
    cx acc(1, 0);
    for (Id k : kids) {
        const Node& kn = node(k);
        if (kn.op == Op::Mul) {
            for (Id kk : kn.kids) {
                if (is_const(kk)) acc *= node(kk).cval;
                else flat.push_back(kk);
            }
        } else if (kn.op == Op::Const) {
            acc *= kn.cval;
        } else {
            flat.push_back(k);
        }
    }
    if (acc == cx(0, 0)) return make_const(cx(0, 0));
    if (acc != cx(1, 0)) flat.push_back(make_const(acc));
    if (flat.empty()) return make_const(cx(1, 0));
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end());
    Node n;
    n.op = Op::Mul;
    n.kids = std::move(flat);
    return arena().intern(std::move(n));
}

// plain complex multiply, skipping the library's NaN-recovery slow path;
// the tape's zero short circuit already guards the inf*0 cases we care about
inline cx fmul(const cx& a, const cx& b) {
    return cx(a.real() * b.real() - a.imag() * b.imag(),
              a.real() * b.imag() + a.imag() * b.real());
}

cx eval_powint(cx b, int p) {
    if (p == 0) return cx(1, 0);
    bool neg = p < 0;
    unsigned long long m = neg ? -(long long)p : (long long)p;
    if (b.imag() == 0) {
        double r = 1, acc = b.real();
        while (m) {
            if (m & 1) r *= acc;
            acc *= acc;
            m >>= 1;
        }
        return cx(neg ? 1.0 / r : r, 0);
    }
    cx r(1, 0), acc = b;
    while (m) {
        if (m & 1) r = fmul(r, acc);
        acc = fmul(acc, acc);
        m >>= 1;
    }
    return neg ? cx(1, 0) / r : r;
}

cx eval_powr(cx b, double r) {
    if (b.imag() == 0 && b.real() > 0) return cx(std::pow(b.real(), r), 0);
    if (b == cx(0, 0)) return r > 0 ? cx(0, 0) : cx(std::numeric_limits<double>::infinity(), 0);
    return std::pow(b, r);
}

Id make_powint(Id e, int p) {
    if (p == 0) return make_const(cx(1, 0));
    if (p == 1) return e;
    const Node& en = node(e);
    if (en.op == Op::Const) return make_const(eval_powint(en.cval, p));
    if (en.op == Op::PowInt) return make_powint(en.kids[0], en.ipow * p);
    Node n;
    n.op = Op::PowInt;
    n.ipow = p;
    n.kids = {e};
    return arena().intern(std::move(n));
}

Id make_powr(Id e, double r) {
    if (r == 0) return make_const(cx(1, 0));
    if (r == 1) return e;
    const Node& en = node(e);
    if (en.op == Op::Const) return make_const(eval_powr(en.cval, r));
    if (en.op == Op::PowReal) return make_powr(en.kids[0], en.rpow * r);
    Node n;
    n.op = Op::PowReal;
    n.rpow = r;
    n.kids = {e};
    return arena().intern(std::move(n));
}

// max(t, 0)^n for real t; a C^{n-1} piecewise-polynomial glue
Id make_pospow(Id e, int p) {
    if (p < 1) fail(errc::config, "pospow exponent must be >= 1");
    const Node& en = node(e);
    if (en.op == Op::Const) {
        double t = en.cval.real();
        return make_const(t > 0 ? eval_powint(cx(t, 0), p) : cx(0, 0));
    }
    Node n;
    n.op = Op::PosPow;
    n.ipow = p;
    n.kids = {e};
    return arena().intern(std::move(n));
}

Id make_unary(Op op, Id e) {
    const Node& en = node(e);
    if (en.op == Op::Const) {
        cx v = en.cval;
        switch (op) {
        case Op::Exp: return make_const(std::exp(v));
        case Op::Log: return make_const(std::log(v));
        case Op::Sin: return make_const(std::sin(v));
        case Op::Cos: return make_const(std::cos(v));
        case Op::PosExp:
            return make_const(v.real() <= 0 ? cx(0, 0) : cx(std::exp(-1.0 / v.real()), 0));
        case Op::Floor: return make_const(cx(std::floor(v.real()), 0));
        default: break;
        }
    }
    Node n;
    n.op = op;
    n.kids = {e};
    return arena().intern(std::move(n));
}

Id derive(Id e, Axis a, int index);

Id derive_uncached(Id e, Axis a, int index) {
    const Node& n = node(e);
    switch (n.op) {
    case Op::Const:
    case Op::Eps:
    case Op::NetConst:
    case Op::Floor: // piecewise-constant; derivative 0 off the jump set
        return make_const(cx(0, 0));
    case Op::Var:
        return (n.axis == a && n.idx == index) ? make_const(cx(1, 0)) : make_const(cx(0, 0));
    case Op::Add: {
        std::vector<Id> kids;
        for (Id k : n.kids) kids.push_back(derive(k, a, index));
        return make_add(std::move(kids));
    }
    case Op::Mul: {
        std::vector<Id> terms;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            std::vector<Id> f;
            f.push_back(derive(n.kids[i], a, index));
            for (std::size_t j = 0; j < n.kids.size(); ++j)
                if (j != i) f.push_back(n.kids[j]);
            terms.push_back(make_mul(std::move(f)));
        }
        return make_add(std::move(terms));
    }
    case Op::PowInt: {
        Id de = derive(n.kids[0], a, index);
        return make_mul({make_const(cx(n.ipow, 0)), make_powint(n.kids[0], n.ipow - 1), de});
    }
    case Op::PowReal: {
        Id de = derive(n.kids[0], a, index);
        return make_mul({make_const(cx(n.rpow, 0)), make_powr(n.kids[0], n.rpow - 1), de});
    }
    case Op::Exp:
        return make_mul({e, derive(n.kids[0], a, index)});
    case Op::Log:
        return make_mul({make_powint(n.kids[0], -1), derive(n.kids[0], a, index)});
    case Op::Sin:
        return make_mul({make_unary(Op::Cos, n.kids[0]), derive(n.kids[0], a, index)});
    case Op::Cos:
        return make_mul({make_const(cx(-1, 0)), make_unary(Op::Sin, n.kids[0]),
                         derive(n.kids[0], a, index)});
    case Op::PosExp:
        // d/dt exp(-1/t) = exp(-1/t)/t^2; the PosExp factor is exactly 0 for
        // t <= 0 and multiplication short-circuits on it
        return make_mul({e, make_powint(n.kids[0], -2), derive(n.kids[0], a, index)});
    case Op::PosPow:
        if (n.ipow <= 1)
            fail(errc::derivative_depth, "pospow differentiated past its smoothness order");
        return make_mul({make_const(cx(n.ipow, 0)), make_pospow(n.kids[0], n.ipow - 1),
                         derive(n.kids[0], a, index)});
    }
    fail(errc::derivative_depth, "unhandled node kind");
}

Id derive(Id e, Axis a, int index) {
    std::uint64_t key = (std::uint64_t(e) << 16) | (std::uint64_t(static_cast<int>(a)) << 8) |
                        std::uint64_t(index & 0xff);
    auto& ar = arena();
    auto it = ar.deriv_memo.find(key);
    if (it != ar.deriv_memo.end()) return it->second;
    Id d = derive_uncached(e, a, index);
    ar.deriv_memo.emplace(key, d);
    return d;
}

Id subst_rec(Id e, const std::map<std::pair<Axis, int>, Expr>& m,
             std::unordered_map<Id, Id>& memo) {
    auto it = memo.find(e);
    if (it != memo.end()) return it->second;
    const Node& n = node(e);
    Id out = e;
    if (n.op == Op::Var) {
        auto mi = m.find({n.axis, (int)n.idx});
        if (mi != m.end()) out = mi->second.id();
    } else if (!n.kids.empty()) {
        std::vector<Id> kids;
        bool changed = false;
        for (Id k : n.kids) {
            Id nk = subst_rec(k, m, memo);
            changed |= (nk != k);
            kids.push_back(nk);
        }
        if (changed) {
            switch (n.op) {
            case Op::Add: out = make_add(std::move(kids)); break;
            case Op::Mul: out = make_mul(std::move(kids)); break;
            case Op::PowInt: out = make_powint(kids[0], n.ipow); break;
            case Op::PowReal: out = make_powr(kids[0], n.rpow); break;
            case Op::PosPow: out = make_pospow(kids[0], n.ipow); break;
            default: out = make_unary(n.op, kids[0]); break;
            }
        }
    }
    memo.emplace(e, out);
    return out;
}

} // namespace

Expr Expr::constant(cx v) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_const(v));
}

Expr Expr::eps() {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    Node n;
    n.op = Op::Eps;
    return Expr::from_id(arena().intern(std::move(n)));
}

Expr Expr::var(Axis a, int index) {
    if (index < 0 || index >= 4) fail(errc::config, "variable index out of range");
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    Node n;
    n.op = Op::Var;
    n.axis = a;
    n.idx = static_cast<std::uint16_t>(index);
    return Expr::from_id(arena().intern(std::move(n)));
}

Expr Expr::net_const(std::function<cx(double)> f) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    Node n;
    n.op = Op::NetConst;
    n.net = std::make_shared<const std::function<cx(double)>>(std::move(f));
    return Expr::from_id(arena().intern(std::move(n)));
}

Expr Expr::from_id(std::uint32_t id) { return Expr(id); }

Expr operator+(Expr a, Expr b) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_add({a.id(), b.id()}));
}
Expr operator-(Expr a, Expr b) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_add({a.id(), make_mul({make_const(cx(-1, 0)), b.id()})}));
}
Expr operator*(Expr a, Expr b) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_mul({a.id(), b.id()}));
}
Expr operator/(Expr a, Expr b) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_mul({a.id(), make_powint(b.id(), -1)}));
}
Expr operator-(Expr a) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_mul({make_const(cx(-1, 0)), a.id()}));
}

Expr Expr::pow(int n) const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_powint(id_, n));
}
Expr Expr::powr(double r) const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_powr(id_, r));
}

Expr exp(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::Exp, e.id()));
}
Expr log(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::Log, e.id()));
}
Expr sin(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::Sin, e.id()));
}
Expr cos(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::Cos, e.id()));
}
Expr posexp(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::PosExp, e.id()));
}
Expr pospow(Expr e, int n) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_pospow(e.id(), n));
}
Expr floor_of(Expr e) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(make_unary(Op::Floor, e.id()));
}

Expr Expr::d(Axis a, int index) const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return Expr::from_id(derive(id_, a, index));
}

Expr Expr::subst(const std::map<std::pair<Axis, int>, Expr>& m) const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    std::unordered_map<Id, Id> memo;
    return Expr::from_id(subst_rec(id_, m, memo));
}

bool Expr::is_zero() const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return is_const_val(id_, cx(0, 0));
}
bool Expr::is_one() const {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return is_const_val(id_, cx(1, 0));
}

Expr xi_norm_sq(int p) {
    Expr s = Expr::constant(0.0);
    for (int i = 0; i < p; ++i) s = s + Expr::var(Axis::Xi, i).pow(2);
    return s;
}
Expr xi_norm(int p) { return xi_norm_sq(p).powr(0.5); }
Expr xi_bracket(int p) { return (Expr::constant(1.0) + xi_norm_sq(p)).powr(0.5); }

Expr smoothstep01(Expr t) {
    Expr h = posexp(t);
    Expr h1 = posexp(Expr::constant(1.0) - t);
    return h / (h + h1);
}

Expr bump(Expr t) { return posexp(Expr::constant(1.0) - t * t); }

Expr spline_bump(Expr t, int n) { return pospow(Expr::constant(1.0) - t * t, n); }

Expr chi_cutoff(int p) {
    // transition on 1/4 < |xi| < 1/2
    Expr t = (xi_norm(p) - 0.25) * 4.0;
    return Expr::constant(1.0) - smoothstep01(t);
}

std::size_t expr_arena_size() {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    return arena().nodes.size();
}

Tape::Tape(std::span<const Expr> roots) {
    std::lock_guard<std::recursive_mutex> g(arena().mu);
    std::unordered_map<Id, std::uint32_t> slot;
    std::vector<std::pair<Id, bool>> stack;
    for (const Expr& r : roots) stack.push_back({r.id(), false});
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (slot.count(id)) continue;
        const Node& n = node(id);
        if (!expanded && !n.kids.empty()) {
            stack.push_back({id, true});
            for (Id k : n.kids)
                if (!slot.count(k)) stack.push_back({k, false});
            continue;
        }
        Entry e;
        e.op = static_cast<std::uint8_t>(n.op);
        e.axis = static_cast<std::uint8_t>(n.axis);
        e.idx = n.idx;
        e.ipow = n.ipow;
        e.rpow = n.rpow;
        e.cval = n.cval;
        e.net = n.net;
        e.kid_off = static_cast<std::uint32_t>(kids_.size());
        e.kid_cnt = static_cast<std::uint32_t>(n.kids.size());
        bool ready = true;
        for (Id k : n.kids) {
            auto it = slot.find(k);
            if (it == slot.end()) { ready = false; break; }
        }
        if (!ready) { // a kid got pushed after us; revisit
            stack.push_back({id, false});
            continue;
        }
        for (Id k : n.kids) kids_.push_back(slot.at(k));
        slot.emplace(id, static_cast<std::uint32_t>(entries_.size()));
        entries_.push_back(std::move(e));
    }
    for (const Expr& r : roots) roots_.push_back(slot.at(r.id()));
}

void Tape::run(const Point& p, std::vector<cx>& v) const {
    v.resize(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& e = entries_[i];
        const std::uint32_t* k = kids_.data() + e.kid_off;
        switch (static_cast<Op>(e.op)) {
        case Op::Const: v[i] = e.cval; break;
        case Op::Eps: v[i] = cx(p.eps, 0); break;
        case Op::Var: {
            double c = 0;
            switch (static_cast<Axis>(e.axis)) {
            case Axis::X: c = p.x[e.idx]; break;
            case Axis::Y: c = p.y[e.idx]; break;
            case Axis::Xi: c = p.xi[e.idx]; break;
            }
            v[i] = cx(c, 0);
            break;
        }
        case Op::Add: {
            cx s(0, 0);
            for (std::uint32_t j = 0; j < e.kid_cnt; ++j) s += v[k[j]];
            v[i] = s;
            break;
        }
        case Op::Mul: {
            // exact-zero short circuit: cutoff factors kill inf/NaN partners
            double re = 1, im = 0;
            bool zero = false;
            for (std::uint32_t j = 0; j < e.kid_cnt; ++j) {
                const cx& c = v[k[j]];
                if (c.real() == 0 && c.imag() == 0) { zero = true; break; }
                double nr = re * c.real() - im * c.imag();
                im = re * c.imag() + im * c.real();
                re = nr;
            }
            v[i] = zero ? cx(0, 0) : cx(re, im);
            break;
        }
        case Op::PowInt: v[i] = eval_powint(v[k[0]], e.ipow); break;
        case Op::PowReal: v[i] = eval_powr(v[k[0]], e.rpow); break;
        case Op::Exp: {
            cx b = v[k[0]];
            v[i] = b.imag() == 0 ? cx(std::exp(b.real()), 0) : std::exp(b);
            break;
        }
        case Op::Log: {
            cx b = v[k[0]];
            v[i] = (b.imag() == 0 && b.real() > 0) ? cx(std::log(b.real()), 0) : std::log(b);
            break;
        }
        case Op::Sin: {
            cx b = v[k[0]];
            v[i] = b.imag() == 0 ? cx(std::sin(b.real()), 0) : std::sin(b);
            break;
        }
        case Op::Cos: {
            cx b = v[k[0]];
            v[i] = b.imag() == 0 ? cx(std::cos(b.real()), 0) : std::cos(b);
            break;
        }
        case Op::PosExp: {
            double t = v[k[0]].real();
            v[i] = t <= 0 ? cx(0, 0) : cx(std::exp(-1.0 / t), 0);
            break;
        }
        case Op::PosPow: {
            double t = v[k[0]].real();
            v[i] = t > 0 ? eval_powint(cx(t, 0), e.ipow) : cx(0, 0);
            break;
        }
        case Op::Floor: v[i] = cx(std::floor(v[k[0]].real()), 0); break;
        case Op::NetConst: v[i] = (*e.net)(p.eps); break;
        }
    }
}

cx Tape::eval(const Point& p) const {
    thread_local std::vector<cx> scratch;
    run(p, scratch);
    return scratch[roots_[0]];
}

void Tape::eval_multi(const Point& p, std::span<cx> out) const {
    thread_local std::vector<cx> scratch;
    run(p, scratch);
    for (std::size_t r = 0; r < roots_.size(); ++r) out[r] = scratch[roots_[r]];
}

void Tape::eval_batch(std::span<const Point> pts, std::span<cx> out) const {
    thread_local std::vector<cx> scratch;
    std::size_t nr = roots_.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        run(pts[i], scratch);
        for (std::size_t r = 0; r < nr; ++r) out[i * nr + r] = scratch[roots_[r]];
    }
}

} // namespace goi

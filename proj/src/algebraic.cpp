#include "maxvar/algebraic.hpp"

namespace maxvar {

int QuadRoot::sign_at(const Rational& x) const {
    Rational v = Rational(a) * x * x + Rational(b) * x + Rational(c);
    return rat_sign(v);
}

void QuadRoot::refine() const {
    Rational mid = (lo + hi) / 2;
    int sm = sign_at(mid);
    // the root is simple and irrational, so sm != 0 and the sign flips there
    if (sm == sign_at(hi))
        hi = mid;
    else
        lo = mid;
}

void QuadRoot::refine_below(const Rational& q) const {
    while (!(hi < q)) refine();
}

void QuadRoot::refine_above(const Rational& q) const {
    while (!(lo > q)) refine();
}

Abscissa Abscissa::neg_inf() {
    Abscissa a;
    a.kind_ = Kind::NegInf;
    return a;
}

Abscissa Abscissa::pos_inf() {
    Abscissa a;
    a.kind_ = Kind::PosInf;
    return a;
}

Abscissa Abscissa::of(Rational v) {
    Abscissa a;
    a.kind_ = Kind::Finite;
    a.value_ = std::move(v);
    return a;
}

Abscissa Abscissa::of_root(std::shared_ptr<const QuadRoot> r) {
    Abscissa a;
    a.kind_ = Kind::Root;
    a.root_ = std::move(r);
    return a;
}

namespace {

// q against an isolated irrational root; never equal.
int cmp_rational_root(const Rational& q, const QuadRoot& r) {
    if (q <= r.lo) return -1;
    if (q >= r.hi) return 1;
    // inside the isolating interval: q is right of the root iff the sign at q
    // matches the sign at hi
    return r.sign_at(q) == r.sign_at(r.hi) ? 1 : -1;
}

int cmp_roots(const QuadRoot& x, const QuadRoot& y) {
    if (x.a == y.a && x.b == y.b && x.c == y.c) {
        if (x.side == y.side) return 0;
        return x.side < y.side ? -1 : 1;
    }
    // distinct irreducible quadratics share no root: refine until disjoint
    while (true) {
        if (x.hi <= y.lo) return -1;
        if (y.hi <= x.lo) return 1;
        if (x.hi - x.lo >= y.hi - y.lo)
            x.refine();
        else
            y.refine();
    }
}

}  // namespace

int cmp(const Abscissa& x, const Abscissa& y) {
    using K = Abscissa::Kind;
    auto rank = [](K k) { return k == K::NegInf ? 0 : (k == K::PosInf ? 2 : 1); };
    int rx = rank(x.kind()), ry = rank(y.kind());
    if (rx != ry) return rx < ry ? -1 : 1;
    if (rx != 1) return 0;  // both the same infinity
    bool xr = x.kind() == K::Root, yr = y.kind() == K::Root;
    if (!xr && !yr) {
        if (x.rational() == y.rational()) return 0;
        return x.rational() < y.rational() ? -1 : 1;
    }
    if (!xr) return cmp_rational_root(x.rational(), y.root());
    if (!yr) return -cmp_rational_root(y.rational(), x.root());
    return cmp_roots(x.root(), y.root());
}

int cmp(const Abscissa& x, const Rational& y) {
    switch (x.kind()) {
        case Abscissa::Kind::NegInf: return -1;
        case Abscissa::Kind::PosInf: return 1;
        case Abscissa::Kind::Finite:
            if (x.rational() == y) return 0;
            return x.rational() < y ? -1 : 1;
        default: return -cmp_rational_root(y, x.root());
    }
}

std::vector<Abscissa> solve_quadratic(const Rational& A, const Rational& B, const Rational& C) {
    if (A == 0) {
        if (B == 0) {
            if (C == 0) throw DegenerateCrossing("identically zero polynomial");
            return {};
        }
        return {Abscissa::of(-C / B)};
    }
    // integer coefficients with positive leading term
    Integer da = boost::multiprecision::denominator(A);
    Integer db = boost::multiprecision::denominator(B);
    Integer dc = boost::multiprecision::denominator(C);
    Integer m = boost::multiprecision::lcm(boost::multiprecision::lcm(da, db), dc);
    Integer a = boost::multiprecision::numerator(A) * (m / da);
    Integer b = boost::multiprecision::numerator(B) * (m / db);
    Integer c = boost::multiprecision::numerator(C) * (m / dc);
    if (a < 0) { a = -a; b = -b; c = -c; }
    Integer g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs(b), a), abs(c));
    if (g > 1) { a /= g; b /= g; c /= g; }

    Integer disc = b * b - 4 * a * c;
    if (disc < 0) return {};
    Integer s = boost::multiprecision::sqrt(disc);  // floor of the square root
    if (s * s == disc) {
        Rational r1 = make_rational(-b - s, 2 * a);
        Rational r2 = make_rational(-b + s, 2 * a);
        if (r1 == r2) return {Abscissa::of(r1)};
        return {Abscissa::of(r1), Abscissa::of(r2)};
    }
    // sqrt(disc) lies strictly in (s, s+1)
    auto left = std::make_shared<QuadRoot>();
    left->a = a; left->b = b; left->c = c; left->side = 0;
    left->lo = make_rational(-b - s - 1, 2 * a);
    left->hi = make_rational(-b - s, 2 * a);
    auto right = std::make_shared<QuadRoot>();
    right->a = a; right->b = b; right->c = c; right->side = 1;
    right->lo = make_rational(-b + s, 2 * a);
    right->hi = make_rational(-b + s + 1, 2 * a);
    return {Abscissa::of_root(left), Abscissa::of_root(right)};
}

Rational rational_between(const Abscissa& a, const Abscissa& b) {
    using K = Abscissa::Kind;
    if (a.kind() == K::NegInf) {
        switch (b.kind()) {
            case K::PosInf: return Rational(0);
            case K::Finite: return b.rational() - 1;
            case K::Root: return b.root().lo - 1;
            default: break;
        }
    }
    if (b.kind() == K::PosInf) {
        if (a.kind() == K::Finite) return a.rational() + 1;
        return a.root().hi + 1;
    }
    if (a.kind() == K::Finite && b.kind() == K::Finite) return (a.rational() + b.rational()) / 2;
    if (a.kind() == K::Finite) {  // b is a root with a < b
        b.root().refine_above(a.rational());
        return (a.rational() + b.root().lo) / 2;
    }
    if (b.kind() == K::Finite) {
        a.root().refine_below(b.rational());
        return (a.root().hi + b.rational()) / 2;
    }
    // two distinct roots: separate their isolating intervals, then any point
    // of [a.hi, b.lo] lies strictly between the roots themselves
    while (!(a.root().hi <= b.root().lo)) {
        a.root().refine();
        b.root().refine();
    }
    return (a.root().hi + b.root().lo) / 2;
}

}  // namespace maxvar

#ifndef MAXVAR_ALGEBRAIC_HPP
#define MAXVAR_ALGEBRAIC_HPP

#include "maxvar/rational.hpp"

#include <memory>
#include <vector>

namespace maxvar {

// Irrational root of an integer quadratic a x^2 + b x + c with a > 0 and a
// non-square positive discriminant.  The isolating interval (lo, hi) contains
// exactly this root, has rational endpoints where the quadratic does not
// vanish, and can be halved on demand.  Because the root is irrational the
// polynomial is irreducible over Q, so two roots are equal exactly when their
// normalized coefficients and side agree.
struct QuadRoot {
    Integer a, b, c;
    int side;  // 0 = smaller root, 1 = larger root
    mutable Rational lo, hi;

    int sign_at(const Rational& x) const;
    void refine() const;                      // halve the isolating interval
    void refine_below(const Rational& q) const;  // shrink until hi < q (requires root < q)
    void refine_above(const Rational& q) const;  // shrink until lo > q (requires root > q)
};

// A point of the extended real line: -inf, a rational, a quadratic
// irrational, or +inf.  Total order computed exactly.
class Abscissa {
  public:
    enum class Kind { NegInf, Finite, Root, PosInf };

    Abscissa() : kind_(Kind::Finite) {}
    static Abscissa neg_inf();
    static Abscissa pos_inf();
    static Abscissa of(Rational v);
    static Abscissa of_root(std::shared_ptr<const QuadRoot> r);

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::Finite || kind_ == Kind::Root; }
    bool is_rational() const { return kind_ == Kind::Finite; }
    const Rational& rational() const { return value_; }
    const QuadRoot& root() const { return *root_; }
    const std::shared_ptr<const QuadRoot>& root_ptr() const { return root_; }

  private:
    Kind kind_;
    Rational value_;
    std::shared_ptr<const QuadRoot> root_;
};

// -1 / 0 / +1 ordering; exact for every mix of kinds.
int cmp(const Abscissa& x, const Abscissa& y);
int cmp(const Abscissa& x, const Rational& y);

inline bool operator<(const Abscissa& x, const Abscissa& y) { return cmp(x, y) < 0; }
inline bool operator==(const Abscissa& x, const Abscissa& y) { return cmp(x, y) == 0; }

// Real roots of A x^2 + B x + C, ascending.  Rational roots come back as
// Finite abscissae, irrational ones as isolated QuadRoots.  The identically
// zero polynomial is rejected.
std::vector<Abscissa> solve_quadratic(const Rational& A, const Rational& B, const Rational& C);

// Some rational strictly between a and b (requires a < b); refines roots as
// needed so the answer is certified.
Rational rational_between(const Abscissa& a, const Abscissa& b);

}  // namespace maxvar

#endif

#pragma once

#include <array>
#include <complex>
#include <stdexcept>

namespace weldnorm {

using Complex = std::complex<double>;

// |z| beyond which evaluation moves to the w = 1/z chart.
inline constexpr double kChartSwitch = 1e8;

constexpr double kPi = 3.141592653589793238462643383279502884;

/// A point of the Riemann sphere: finite complex value or the point at infinity.
struct ExtComplex {
    Complex v{0.0, 0.0};
    bool inf = false;

    constexpr ExtComplex() = default;
    constexpr ExtComplex(double re) : v(re, 0.0) {}
    constexpr ExtComplex(double re, double im) : v(re, im) {}
    ExtComplex(Complex z) : v(z) {}

    static constexpr ExtComplex infinity() {
        ExtComplex z;
        z.inf = true;
        return z;
    }

    bool is_inf() const { return inf; }
    bool finite() const { return !inf; }

    /// Finite value; throws if this is the point at infinity.
    Complex value() const;

    /// Value in the w = 1/z chart (infinity maps to 0).
    Complex chart_value() const { return inf ? Complex(0.0) : 1.0 / v; }

    /// True if the point should be handled in the 1/z chart.
    bool near_infinity() const { return inf || std::abs(v) > kChartSwitch; }

    friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
        if (a.inf || b.inf) return a.inf && b.inf;
        return a.v == b.v;
    }
};

/// Chordal metric d(z,w) = 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)); treats infinity symmetrically.
double spherical_dist(const ExtComplex& a, const ExtComplex& b);

struct DegenerateTriple : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ChartError : std::domain_error {
    using std::domain_error::domain_error;
};

/// An element of PSL2(C) as a determinant-normalized 2x2 complex matrix.
class Mobius {
public:
    Mobius() : a_(1), b_(0), c_(0), d_(1) {}
    /// Normalizes ad - bc to 1. Throws std::invalid_argument on a singular matrix.
    Mobius(Complex a, Complex b, Complex c, Complex d);

    static Mobius identity() { return Mobius(); }
    /// z -> (z - i)/(z + i), upper half-plane onto the unit disk, R-hat onto S^1.
    static Mobius cayley();
    /// The unique map with p_i -> q_i; throws DegenerateTriple on repeated anchors.
    static Mobius from_triples(const ExtComplex& p1, const ExtComplex& p2, const ExtComplex& p3,
                               const ExtComplex& q1, const ExtComplex& q2, const ExtComplex& q3);

    ExtComplex operator()(const ExtComplex& z) const;

    /// Derivative with chart handling: finite z and finite T(z) gives 1/(cz+d)^2.
    /// At a pole the result is infinity; for z = infinity the value is the
    /// derivative of T(1/w) at w = 0 (affine maps report their slope a/d).
    ExtComplex derivative(const ExtComplex& z) const;

    Mobius inverse() const { return Mobius(d_, -b_, -c_, a_); }

    /// Composition: (S * T)(z) = S(T(z)); renormalized to det 1.
    friend Mobius operator*(const Mobius& S, const Mobius& T);

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }

    bool is_real(double tol = 1e-12) const;
    double entry_dist(const Mobius& other) const;  // min over the +/- PSL2 ambiguity

private:
    Complex a_, b_, c_, d_;
};

/// |(T(x)-T(y))^2 / (T'(x) T'(y) (x-y)^2)|; equals 1 for every Mobius map.
/// Throws ChartError if any of x, y, T(x), T(y) is infinite.
double cross_ratio_defect(const Mobius& T, const ExtComplex& x, const ExtComplex& y);

/// A generalized circle: either a true circle or a line (circle through infinity),
/// with an orientation flag selecting which complementary disk is "inside".
class Cline {
public:
    static Cline circle(Complex center, double radius, bool ccw = true);
    static Cline line(Complex point, Complex unit_dir);
    static Cline unit_circle() { return circle(Complex(0, 0), 1.0); }
    static Cline real_line() { return line(Complex(0, 0), Complex(1, 0)); }
    /// Cline through three distinct points (line if they are collinear / include infinity).
    static Cline through(const ExtComplex& p1, const ExtComplex& p2, const ExtComplex& p3);

    bool is_line() const { return is_line_; }
    Complex center() const;
    double radius() const;
    Complex line_point() const;
    Complex line_dir() const;

    bool contains(const ExtComplex& z, double tol = 1e-9) const;
    std::array<ExtComplex, 3> three_points() const;

    /// Schwarz reflection across the cline; an involution fixing the cline pointwise.
    ExtComplex reflect(const ExtComplex& u) const;

    Cline image_under(const Mobius& T) const;

private:
    Cline() = default;
    bool is_line_ = false;
    Complex center_{0, 0};  // line: a point on it
    double radius_ = 1.0;
    Complex dir_{1, 0};  // line only: unit direction
    bool ccw_ = true;
};

/// Schwarz reflection across a cline (free-function form of Cline::reflect).
inline ExtComplex schwarz_reflect(const Cline& c, const ExtComplex& u) { return c.reflect(u); }

}  // namespace weldnorm

#include "weldnorm/sphere.hpp"

#include <cmath>

namespace weldnorm {

Complex ExtComplex::value() const {
    if (inf) throw ChartError("finite value requested at the point at infinity");
    return v;
}

double spherical_dist(const ExtComplex& a, const ExtComplex& b) {
    if (a.inf && b.inf) return 0.0;
    if (a.inf || b.inf) {
        const Complex z = a.inf ? b.v : a.v;
        return 2.0 / std::sqrt(1.0 + std::norm(z));
    }
    return 2.0 * std::abs(a.v - b.v) / std::sqrt((1.0 + std::norm(a.v)) * (1.0 + std::norm(b.v)));
}

Mobius::Mobius(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
    const Complex det = a_ * d_ - b_ * c_;
    if (std::abs(det) < 1e-300) throw std::invalid_argument("singular Mobius matrix");
    if (std::abs(det - Complex(1.0)) <= 1e-14) return;  // keep already-normalized entries bit-stable
    const Complex s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
}

Mobius Mobius::cayley() { return Mobius(Complex(1, 0), Complex(0, -1), Complex(1, 0), Complex(0, 1)); }

ExtComplex Mobius::operator()(const ExtComplex& z) const {
    if (z.near_infinity()) {
        // evaluate (a + b w)/(c + d w) at w = 1/z
        const Complex w = z.chart_value();
        const Complex num = a_ + b_ * w;
        const Complex den = c_ + d_ * w;
        if (std::abs(den) <= 1e-15 * std::abs(num)) return ExtComplex::infinity();
        const Complex val = num / den;
        if (std::abs(val) > kChartSwitch * 1e6) return ExtComplex::infinity();
        return ExtComplex(val);
    }
    const Complex num = a_ * z.v + b_;
    const Complex den = c_ * z.v + d_;
    if (std::abs(den) <= 1e-300 || std::abs(den) <= 1e-16 * std::abs(num)) return ExtComplex::infinity();
    return ExtComplex(num / den);
}

ExtComplex Mobius::derivative(const ExtComplex& z) const {
    if (z.is_inf()) {
        if (std::abs(c_) < 1e-14) return ExtComplex(a_ / d_);  // affine slope
        return ExtComplex(-1.0 / (c_ * c_));                   // d/dw T(1/w) at w = 0
    }
    const Complex den = c_ * z.v + d_;
    if (std::abs(den) < 1e-150) return ExtComplex::infinity();
    return ExtComplex(1.0 / (den * den));
}

Mobius operator*(const Mobius& S, const Mobius& T) {
    return Mobius(S.a_ * T.a_ + S.b_ * T.c_, S.a_ * T.b_ + S.b_ * T.d_,
                  S.c_ * T.a_ + S.d_ * T.c_, S.c_ * T.b_ + S.d_ * T.d_);
}

bool Mobius::is_real(double tol) const {
    double im = std::abs(a_.imag()) + std::abs(b_.imag()) + std::abs(c_.imag()) + std::abs(d_.imag());
    double re = std::abs(a_.real()) + std::abs(b_.real()) + std::abs(c_.real()) + std::abs(d_.real());
    // the PSL2 representative may be i*(real matrix)
    return im <= tol * (re + im) || re <= tol * (re + im);
}

double Mobius::entry_dist(const Mobius& other) const {
    double dp = std::abs(a_ - other.a_) + std::abs(b_ - other.b_) + std::abs(c_ - other.c_) +
                std::abs(d_ - other.d_);
    double dm = std::abs(a_ + other.a_) + std::abs(b_ + other.b_) + std::abs(c_ + other.c_) +
                std::abs(d_ + other.d_);
    const double scale = std::max(
        1.0, 0.25 * (std::abs(a_) + std::abs(b_) + std::abs(c_) + std::abs(d_) + std::abs(other.a_) +
                     std::abs(other.b_) + std::abs(other.c_) + std::abs(other.d_)));
    return std::min(dp, dm) / scale;
}

namespace {

// Map with (p1, p2, p3) -> (0, 1, infinity): z -> ((z-p1)(p2-p3)) / ((z-p3)(p2-p1)),
// with the usual degenerate forms when an anchor is infinity.
Mobius to_zero_one_inf(const ExtComplex& p1, const ExtComplex& p2, const ExtComplex& p3) {
    if (p1.is_inf()) {
        // z -> (p2 - p3)/(z - p3)
        return Mobius(Complex(0), p2.value() - p3.value(), Complex(1), -p3.value());
    }
    if (p2.is_inf()) {
        // z -> (z - p1)/(z - p3)
        return Mobius(Complex(1), -p1.value(), Complex(1), -p3.value());
    }
    if (p3.is_inf()) {
        // z -> (z - p1)/(p2 - p1)
        return Mobius(Complex(1), -p1.value(), Complex(0), p2.value() - p1.value());
    }
    const Complex a = p2.value() - p3.value();
    const Complex c = p2.value() - p1.value();
    return Mobius(a, -p1.value() * a, c, -p3.value() * c);
}

}  // namespace

Mobius Mobius::from_triples(const ExtComplex& p1, const ExtComplex& p2, const ExtComplex& p3,
                            const ExtComplex& q1, const ExtComplex& q2, const ExtComplex& q3) {
    const double tol = 1e-13;
    if (spherical_dist(p1, p2) < tol || spherical_dist(p1, p3) < tol || spherical_dist(p2, p3) < tol ||
        spherical_dist(q1, q2) < tol || spherical_dist(q1, q3) < tol || spherical_dist(q2, q3) < tol)
        throw DegenerateTriple("mobius_from_triples: repeated anchor point");
    return to_zero_one_inf(q1, q2, q3).inverse() * to_zero_one_inf(p1, p2, p3);
}

double cross_ratio_defect(const Mobius& T, const ExtComplex& x, const ExtComplex& y) {
    if (x.is_inf() || y.is_inf()) throw ChartError("cross_ratio_defect: infinite argument");
    const ExtComplex Tx = T(x), Ty = T(y);
    if (Tx.is_inf() || Ty.is_inf()) throw ChartError("cross_ratio_defect: image at infinity");
    const Complex dx = T.derivative(x).value();
    const Complex dy = T.derivative(y).value();
    const Complex num = (Tx.value() - Ty.value()) * (Tx.value() - Ty.value());
    const Complex den = dx * dy * (x.value() - y.value()) * (x.value() - y.value());
    return std::abs(num / den);
}

Cline Cline::circle(Complex center, double radius, bool ccw) {
    Cline c;
    c.is_line_ = false;
    c.center_ = center;
    c.radius_ = radius;
    c.ccw_ = ccw;
    if (!(radius > 0)) throw std::invalid_argument("circle radius must be positive");
    return c;
}

Cline Cline::line(Complex point, Complex unit_dir) {
    Cline c;
    c.is_line_ = true;
    c.center_ = point;
    double n = std::abs(unit_dir);
    if (n < 1e-300) throw std::invalid_argument("line direction must be nonzero");
    c.dir_ = unit_dir / n;
    return c;
}

Complex Cline::center() const {
    if (is_line_) throw std::logic_error("center() on a line");
    return center_;
}
double Cline::radius() const {
    if (is_line_) throw std::logic_error("radius() on a line");
    return radius_;
}
Complex Cline::line_point() const {
    if (!is_line_) throw std::logic_error("line_point() on a circle");
    return center_;
}
Complex Cline::line_dir() const {
    if (!is_line_) throw std::logic_error("line_dir() on a circle");
    return dir_;
}

Cline Cline::through(const ExtComplex& p1, const ExtComplex& p2, const ExtComplex& p3) {
    const double tol = 1e-13;
    if (spherical_dist(p1, p2) < tol || spherical_dist(p1, p3) < tol || spherical_dist(p2, p3) < tol)
        throw DegenerateTriple("cline through repeated points");
    if (p1.is_inf() || p2.is_inf() || p3.is_inf()) {
        const Complex a = p1.is_inf() ? p2.value() : p1.value();
        const Complex b = p3.is_inf() ? p2.value() : p3.value();
        return line(a, b - a);
    }
    const Complex z1 = p1.value(), z2 = p2.value(), z3 = p3.value();
    // collinear test via the imaginary part of (z3-z1)/(z2-z1)
    const Complex r = (z3 - z1) / (z2 - z1);
    if (std::abs(r.imag()) < 1e-13 * (1.0 + std::abs(r.real()))) return line(z1, z2 - z1);
    // circumcenter
    const double n1 = std::norm(z1), n2 = std::norm(z2), n3 = std::norm(z3);
    const Complex d21 = z2 - z1, d31 = z3 - z1;
    const double det = d21.real() * d31.imag() - d21.imag() * d31.real();
    const double ux = 0.5 * ((n2 - n1) * d31.imag() - (n3 - n1) * d21.imag()) / det;
    const double uy = 0.5 * ((n3 - n1) * d21.real() - (n2 - n1) * d31.real()) / det;
    const Complex cen(ux, uy);
    return circle(cen, std::abs(z1 - cen), det > 0);
}

bool Cline::contains(const ExtComplex& z, double tol) const {
    if (z.is_inf()) return is_line_;
    if (is_line_) {
        const Complex rel = (z.v - center_) / dir_;
        return std::abs(rel.imag()) <= tol * (1.0 + std::abs(rel.real()));
    }
    return std::abs(std::abs(z.v - center_) - radius_) <= tol * (1.0 + radius_);
}

std::array<ExtComplex, 3> Cline::three_points() const {
    if (is_line_) return {ExtComplex(center_), ExtComplex(center_ + dir_), ExtComplex::infinity()};
    return {ExtComplex(center_ + radius_), ExtComplex(center_ + Complex(0, 1) * radius_),
            ExtComplex(center_ - radius_)};
}

ExtComplex Cline::reflect(const ExtComplex& u) const {
    if (is_line_) {
        if (u.is_inf()) return u;
        const Complex rel = (u.v - center_) / dir_;
        return ExtComplex(center_ + dir_ * std::conj(rel));
    }
    if (u.is_inf()) return ExtComplex(center_);
    const Complex d = u.v - center_;
    if (std::abs(d) < radius_ * 1e-14) return ExtComplex::infinity();
    return ExtComplex(center_ + radius_ * radius_ / std::conj(d));
}

Cline Cline::image_under(const Mobius& T) const {
    const auto pts = three_points();
    return through(T(pts[0]), T(pts[1]), T(pts[2]));
}

}  // namespace weldnorm

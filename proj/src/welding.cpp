#include "weldnorm/welding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weldnorm {

namespace {
constexpr double kKnotTol = 1e-10;
const double kTwoPi = 2.0 * kPi;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0 ? t + kTwoPi : t;
}
}  // namespace

CircularChart::CircularChart(const Cline& c) {
    if (c.is_line()) {
        // (affine onto the line) o inverse Cayley, so S^1 -> line with angle 0 at infinity
        const Mobius affine(c.line_dir(), c.line_point(), Complex(0), Complex(1));
        to_cline_ = affine * Mobius::cayley().inverse();
    } else {
        to_cline_ = Mobius(Complex(c.radius()), c.center(), Complex(0), Complex(1));  // c + r z
    }
    from_cline_ = to_cline_.inverse();
}

double CircularChart::angle(const ExtComplex& z) const {
    const ExtComplex w = from_cline_(z);
    if (w.is_inf()) throw ChartError("point not on the chart's cline");
    return wrap_angle(std::arg(w.value()));
}

ExtComplex CircularChart::point(double theta) const {
    return to_cline_(ExtComplex(std::polar(1.0, theta)));
}

// ---------------------------------------------------------------------------
// PiecewiseMobius
// ---------------------------------------------------------------------------

PiecewiseMobius::PiecewiseMobius(Cline domain, std::vector<ExtComplex> knots,
                                 std::vector<Mobius> branches)
    : domain_(domain), range_(domain), chart_(domain), knots_(std::move(knots)),
      branches_(std::move(branches)) {
    if (knots_.empty() || knots_.size() != branches_.size())
        throw std::invalid_argument("piecewise-Mobius welding needs one branch per knot arc");
    // sort into circular order by chart angle, keeping knot->branch association
    std::vector<std::size_t> order(knots_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> ang(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!domain_.contains(knots_[i], 1e-8)) throw DomainMismatch("knot not on domain cline");
        ang[i] = chart_.angle(knots_[i]);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
    std::vector<ExtComplex> ks;
    std::vector<Mobius> bs;
    std::vector<double> as;
    for (std::size_t i : order) {
        if (!as.empty() && ang[i] - as.back() < 1e-13)
            throw std::invalid_argument("repeated knots");
        ks.push_back(knots_[i]);
        bs.push_back(branches_[i]);
        as.push_back(ang[i]);
    }
    knots_ = std::move(ks);
    branches_ = std::move(bs);
    knot_angles_ = std::move(as);

    const std::size_t n = knots_.size();
    const CircularChart out_chart(range_);
    for (std::size_t i = 0; i < n; ++i) {
        const ExtComplex k = knots_[(i + 1) % n];
        const ExtComplex a = branches_[i](k);
        const ExtComplex b = branches_[(i + 1) % n](k);
        if (spherical_dist(a, b) > kKnotTol)
            throw std::invalid_argument("branch values disagree at a shared knot");
        // per-branch orientation along the cline: the image angle must advance;
        // sign of d/dtheta of (out-chart^-1 o branch o in-chart)(e^{i theta})
        const double t0 = knot_angles_[i];
        double t1 = knot_angles_[(i + 1) % n];
        if (t1 <= t0) t1 += kTwoPi;
        const Mobius circle_map = out_chart.chart().inverse() * branches_[i] * chart_.chart();
        int checked = 0;
        for (int s = 1; s <= 5; ++s) {
            const double t = wrap_angle(t0 + (t1 - t0) * s / 6.0);
            const Complex w_in = std::polar(1.0, t);
            const ExtComplex w_out = circle_map(ExtComplex(w_in));
            const ExtComplex dm = circle_map.derivative(ExtComplex(w_in));
            if (w_out.is_inf() || dm.is_inf()) continue;
            const Complex tangent = dm.value() * Complex(0, 1) * w_in;
            const double sign =
                tangent.real() * (Complex(0, 1) * w_out.value()).real() +
                tangent.imag() * (Complex(0, 1) * w_out.value()).imag();
            ++checked;
            if (!(sign > 0)) throw std::invalid_argument("branch not orientation-preserving");
            const ExtComplex img = branches_[i](chart_.point(t));
            if (img.finite() && !range_.contains(img, 1e-6))
                throw DomainMismatch("branch does not map the domain cline into itself");
        }
        if (checked == 0) throw std::invalid_argument("could not probe branch orientation");
    }
    // bijection: the image arcs wind around the range cline exactly once
    if (n >= 2) {
        double winding = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = out_chart.angle(branches_[i](knots_[i]));
            const double b = out_chart.angle(branches_[(i + 1) % n](knots_[(i + 1) % n]));
            double d = b - a;
            while (d <= 0) d += kTwoPi;
            winding += d;
        }
        if (std::abs(winding - kTwoPi) > 1e-6)
            throw std::invalid_argument("image arcs do not tile the cline once");
    }
}

std::size_t PiecewiseMobius::arc_index(const ExtComplex& x) const {
    const double t = chart_.angle(x);
    // arc i is [knot_angles_[i], knot_angles_[i+1]) circularly
    const auto it = std::upper_bound(knot_angles_.begin(), knot_angles_.end(), t);
    if (it == knot_angles_.begin() || it == knot_angles_.end()) return knot_angles_.size() - 1;
    return static_cast<std::size_t>(it - knot_angles_.begin()) - 1;
}

ExtComplex PiecewiseMobius::eval(const ExtComplex& x) const { return branches_[arc_index(x)](x); }

double PiecewiseMobius::derivative(const ExtComplex& x) const {
    const ExtComplex d = branches_[arc_index(x)].derivative(x);
    if (d.is_inf()) return std::numeric_limits<double>::infinity();
    return std::abs(d.value());
}

ExtComplex PiecewiseMobius::eval_inverse(const ExtComplex& y) const { return inverse()->eval(y); }

std::shared_ptr<const Welding> PiecewiseMobius::inverse() const {
    if (!inverse_cache_) {
        const std::size_t n = knots_.size();
        std::vector<ExtComplex> ik(n);
        std::vector<Mobius> ib(n);
        for (std::size_t i = 0; i < n; ++i) {
            ik[i] = branches_[i](knots_[i]);  // image of the arc start
            ib[i] = branches_[i].inverse();
        }
        inverse_cache_ = std::make_shared<PiecewiseMobius>(range_, std::move(ik), std::move(ib));
    }
    return inverse_cache_;
}

// ---------------------------------------------------------------------------
// SampledWelding
// ---------------------------------------------------------------------------

namespace {

// Fritsch-Carlson limited slopes for monotone cubic Hermite data.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) m[i] = 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        const double a = m[i] / d[i], b = m[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    return m;
}

double hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t) + y1 * (-2 * t3 + 3 * t2) +
           h * m1 * (t3 - t2);
}

double hermite_deriv(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t;
    return (y0 * (6 * t2 - 6 * t) / h + m0 * (3 * t2 - 4 * t + 1) + y1 * (6 * t - 6 * t2) / h +
            m1 * (3 * t2 - 2 * t));
}

}  // namespace

SampledWelding::SampledWelding(Cline domain, Cline range, std::vector<ExtComplex> nodes,
                               std::vector<ExtComplex> values)
    : domain_(domain), range_(range), chart_in_(domain), chart_out_(range),
      nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() != values_.size() || nodes_.size() < 4)
        throw std::invalid_argument("sampled welding needs >= 4 node/value pairs");
    const std::size_t n = nodes_.size();
    std::vector<double> ti(n), to(n);
    for (std::size_t i = 0; i < n; ++i) {
        ti[i] = chart_in_.angle(nodes_[i]);
        to[i] = chart_out_.angle(values_[i]);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ti[a] < ti[b]; });
    th_in_.resize(n + 1);
    th_out_.resize(n + 1);
    {
        std::vector<ExtComplex> ns(n), vs(n);
        for (std::size_t i = 0; i < n; ++i) {
            ns[i] = nodes_[order[i]];
            vs[i] = values_[order[i]];
            th_in_[i] = ti[order[i]];
            th_out_[i] = to[order[i]];
        }
        nodes_ = std::move(ns);
        values_ = std::move(vs);
    }
    // unwrap output angles to a strictly increasing sequence
    for (std::size_t i = 1; i < n; ++i) {
        while (th_out_[i] <= th_out_[i - 1]) th_out_[i] += kTwoPi;
        if (th_out_[i] - th_out_[i - 1] >= kTwoPi)
            throw std::invalid_argument("sampled welding values not strictly monotone");
    }
    if (th_out_[n - 1] - th_out_[0] >= kTwoPi)
        throw std::invalid_argument("sampled welding values wrap more than once");
    th_in_[n] = th_in_[0] + kTwoPi;
    th_out_[n] = th_out_[0] + kTwoPi;
    slope_ = monotone_slopes(th_in_, th_out_);
    // periodic end slopes: use the wrap-around neighbor difference
    const double d_last = (th_out_[n] - th_out_[n - 1]) / (th_in_[n] - th_in_[n - 1]);
    const double d_first = (th_out_[1] - th_out_[0]) / (th_in_[1] - th_in_[0]);
    const double m_wrap = 0.5 * (d_last + d_first);
    slope_[0] = slope_[n] = std::min({m_wrap, 3 * d_first, 3 * d_last});
    if (slope_[0] < 0) slope_[0] = slope_[n] = 0.0;
}

double SampledWelding::angle_map(double theta) const {
    const std::size_t n = nodes_.size();
    double t = th_in_[0] + wrap_angle(theta - th_in_[0]);
    auto it = std::upper_bound(th_in_.begin(), th_in_.end(), t);
    std::size_t i = (it == th_in_.begin()) ? 0 : static_cast<std::size_t>(it - th_in_.begin()) - 1;
    if (i >= n) i = n - 1;
    return hermite(th_in_[i], th_in_[i + 1], th_out_[i], th_out_[i + 1], slope_[i], slope_[i + 1], t);
}

double SampledWelding::angle_map_derivative(double theta) const {
    const std::size_t n = nodes_.size();
    double t = th_in_[0] + wrap_angle(theta - th_in_[0]);
    auto it = std::upper_bound(th_in_.begin(), th_in_.end(), t);
    std::size_t i = (it == th_in_.begin()) ? 0 : static_cast<std::size_t>(it - th_in_.begin()) - 1;
    if (i >= n) i = n - 1;
    return hermite_deriv(th_in_[i], th_in_[i + 1], th_out_[i], th_out_[i + 1], slope_[i], slope_[i + 1], t);
}

ExtComplex SampledWelding::eval(const ExtComplex& x) const {
    return chart_out_.point(wrap_angle(angle_map(chart_in_.angle(x))));
}

namespace {
// |dz/dtheta| along a chart: modulus of d/dtheta R(e^{i theta})
double chart_speed(const CircularChart& chart, double theta) {
    const ExtComplex w(std::polar(1.0, theta));
    const ExtComplex d = chart.chart().derivative(w);
    if (d.is_inf()) return std::numeric_limits<double>::infinity();
    return std::abs(d.value());  // |R'(w)| * |dw/dtheta| with |dw/dtheta| = 1
}
}  // namespace

double SampledWelding::derivative(const ExtComplex& x) const {
    const double ti = chart_in_.angle(x);
    const double to = wrap_angle(angle_map(ti));
    const double a = angle_map_derivative(ti);
    return a * chart_speed(chart_out_, to) / chart_speed(chart_in_, ti);
}

std::vector<ExtComplex> SampledWelding::knots() const { return nodes_; }

ExtComplex SampledWelding::eval_inverse(const ExtComplex& y) const { return inverse()->eval(y); }

std::shared_ptr<const Welding> SampledWelding::inverse() const {
    return std::make_shared<SampledWelding>(range_, domain_, values_, nodes_);
}

// ---------------------------------------------------------------------------
// wrappers and free functions
// ---------------------------------------------------------------------------

namespace {

class ComposedWelding : public Welding {
public:
    ComposedWelding(WeldingPtr h1, WeldingPtr h2) : h1_(std::move(h1)), h2_(std::move(h2)) {}
    const Cline& domain() const override { return h2_->domain(); }
    const Cline& range() const override { return h1_->range(); }
    ExtComplex eval(const ExtComplex& x) const override { return h1_->eval(h2_->eval(x)); }
    ExtComplex eval_inverse(const ExtComplex& y) const override {
        return h2_->eval_inverse(h1_->eval_inverse(y));
    }
    double derivative(const ExtComplex& x) const override {
        return h1_->derivative(h2_->eval(x)) * h2_->derivative(x);
    }
    std::vector<ExtComplex> knots() const override {
        std::vector<ExtComplex> ks = h2_->knots();
        for (const auto& k : h1_->knots()) ks.push_back(h2_->eval_inverse(k));
        return ks;
    }
    std::shared_ptr<const Welding> inverse() const override {
        return std::make_shared<ComposedWelding>(h2_->inverse(), h1_->inverse());
    }

private:
    WeldingPtr h1_, h2_;
};

class ConjugatedWelding : public Welding {
public:
    ConjugatedWelding(WeldingPtr h, Mobius S, Mobius T)
        : h_(std::move(h)), S_(S), T_(T), Sinv_(S.inverse()), Tinv_(T.inverse()),
          domain_(h_->domain().image_under(Tinv_)), range_(h_->range().image_under(S)) {}
    const Cline& domain() const override { return domain_; }
    const Cline& range() const override { return range_; }
    ExtComplex eval(const ExtComplex& x) const override { return S_(h_->eval(T_(x))); }
    ExtComplex eval_inverse(const ExtComplex& y) const override {
        return Tinv_(h_->eval_inverse(Sinv_(y)));
    }
    double derivative(const ExtComplex& x) const override {
        const ExtComplex tx = T_(x);
        const ExtComplex hx = h_->eval(tx);
        const ExtComplex dS = S_.derivative(hx), dT = T_.derivative(x);
        if (dS.is_inf() || dT.is_inf()) return std::numeric_limits<double>::infinity();
        return std::abs(dS.value()) * h_->derivative(tx) * std::abs(dT.value());
    }
    std::vector<ExtComplex> knots() const override {
        std::vector<ExtComplex> ks;
        for (const auto& k : h_->knots()) ks.push_back(Tinv_(k));
        return ks;
    }
    std::shared_ptr<const Welding> inverse() const override {
        return std::make_shared<ConjugatedWelding>(h_->inverse(), Tinv_, Sinv_);
    }

private:
    WeldingPtr h_;
    Mobius S_, T_, Sinv_, Tinv_;
    Cline domain_, range_;
};

ExtComplex arc_midpoint(const CircularChart& chart, double a0, double a1) {
    if (a1 <= a0) a1 += kTwoPi;
    return chart.point(wrap_angle(0.5 * (a0 + a1)));
}

}  // namespace

WeldingPtr example_h() {
    const auto inf = ExtComplex::infinity();
    std::vector<ExtComplex> knots{ExtComplex(0.0), ExtComplex(1.0), ExtComplex(3.0), inf};
    std::vector<Mobius> branches{
        Mobius(7, 0, 6, 1),    // (0,1):   7x/(6x+1)
        Mobius(2, -9, 3, -10), // (1,3):   (2x-9)/(3x-10)
        Mobius(7, -18, 0, 1),  // (3,inf): 7x-18
        Mobius(7, 0, 0, 1),    // (inf,0): 7x
    };
    return std::make_shared<PiecewiseMobius>(Cline::real_line(), std::move(knots), std::move(branches));
}

WeldingPtr identity_welding(const Cline& c) { return mobius_welding(c, Mobius::identity()); }

WeldingPtr mobius_welding(const Cline& c, const Mobius& T) {
    const auto pts = c.three_points();
    return std::make_shared<PiecewiseMobius>(c, std::vector<ExtComplex>{pts[0]},
                                             std::vector<Mobius>{T});
}

WeldingPtr compose(const WeldingPtr& h1, const WeldingPtr& h2) {
    const auto p1 = std::dynamic_pointer_cast<const PiecewiseMobius>(h1);
    const auto p2 = std::dynamic_pointer_cast<const PiecewiseMobius>(h2);
    {
        // domains must match: h2's range feeds h1
        const auto probe = h2->range().three_points();
        for (const auto& q : probe)
            if (!h1->domain().contains(q, 1e-6)) throw DomainMismatch("compose: cline mismatch");
    }
    if (p1 && p2) {
        // refined knot set: knots(h2) union h2^{-1}(knots(h1)), deduplicated
        CircularChart chart(p2->domain().is_line() ? p2->domain() : p2->domain());
        std::vector<ExtComplex> ks = p2->knots();
        for (const auto& k : p1->knots()) ks.push_back(p2->eval_inverse(k));
        std::vector<double> ang;
        ang.reserve(ks.size());
        const CircularChart& ch = p2->chart();
        for (const auto& k : ks) ang.push_back(ch.angle(k));
        std::vector<std::size_t> order(ks.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
        std::vector<ExtComplex> knots;
        std::vector<double> kang;
        for (std::size_t i : order) {
            if (!kang.empty() && ang[i] - kang.back() < 1e-10) continue;
            if (!kang.empty() && ang[i] + 1e-10 > kang.front() + kTwoPi) continue;
            knots.push_back(ks[i]);
            kang.push_back(ang[i]);
        }
        std::vector<Mobius> branches;
        const std::size_t n = knots.size();
        for (std::size_t i = 0; i < n; ++i) {
            const ExtComplex mid = arc_midpoint(ch, kang[i], kang[(i + 1) % n]);
            branches.push_back(p1->branch_at(p2->eval(mid)) * p2->branch_at(mid));
        }
        return std::make_shared<PiecewiseMobius>(p2->domain(), std::move(knots), std::move(branches));
    }
    return std::make_shared<ComposedWelding>(h1, h2);
}

WeldingPtr conjugate(const WeldingPtr& h, const Mobius& S, const Mobius& T) {
    const Cline new_domain = h->domain().image_under(T.inverse());
    {
        const auto probe = new_domain.three_points();
        for (const auto& q : probe)
            if (!h->domain().contains(T(q), 1e-6)) throw DomainMismatch("conjugate: T does not map onto h's cline");
    }
    if (const auto pm = std::dynamic_pointer_cast<const PiecewiseMobius>(h)) {
        const Mobius Tinv = T.inverse();
        // does T preserve the circular orientation of the domain cline?
        const CircularChart new_chart(new_domain);
        const Mobius circle_map = pm->chart().chart().inverse() * T * new_chart.chart();
        bool preserves = true;
        for (double t : {0.4, 1.9, 3.6, 5.1}) {
            const Complex w = std::polar(1.0, t);
            const ExtComplex img = circle_map(ExtComplex(w));
            const ExtComplex dm = circle_map.derivative(ExtComplex(w));
            if (img.is_inf() || dm.is_inf()) continue;
            const Complex tangent = dm.value() * Complex(0, 1) * w;
            const Complex dir = Complex(0, 1) * img.value();
            preserves = tangent.real() * dir.real() + tangent.imag() * dir.imag() > 0;
            break;
        }
        const std::size_t n = pm->branch_count();
        std::vector<ExtComplex> knots;
        std::vector<Mobius> branches;
        for (std::size_t i = 0; i < n; ++i) {
            knots.push_back(Tinv(pm->knots()[i]));
            // under a reversing T the arc starting at T^-1(k_i) is the image of
            // the original arc ending at k_i
            branches.push_back(S * pm->branch(preserves ? i : (i + n - 1) % n) * T);
        }
        return std::make_shared<PiecewiseMobius>(new_domain, std::move(knots), std::move(branches));
    }
    return std::make_shared<ConjugatedWelding>(h, S, T);
}

WeldingPtr invert(const WeldingPtr& h) { return h->inverse(); }

WeldingPtr self_compose(const WeldingPtr& h, int n) {
    if (n < 1) throw std::invalid_argument("self_compose: n must be >= 1");
    WeldingPtr acc = h;
    for (int i = 1; i < n; ++i) acc = compose(h, acc);
    return acc;
}

NormalizedWelding normalize_fix_infty(const WeldingPtr& h, const ExtComplex& y) {
    const auto inf = ExtComplex::infinity();
    auto anchor_map = [&](const Cline& c, const ExtComplex& target) {
        // Mobius R-hat -> c with inf -> target; auxiliary anchors a third of a
        // turn apart keep the image triple positively oriented.
        const CircularChart chart(c);
        const double t = chart.angle(target);
        const ExtComplex q1 = chart.point(wrap_angle(t + kTwoPi / 3.0));
        const ExtComplex q2 = chart.point(wrap_angle(t + 2.0 * kTwoPi / 3.0));
        return Mobius::from_triples(ExtComplex(0.0), ExtComplex(1.0), inf, q1, q2, target);
    };
    const ExtComplex hy = h->eval(y);
    const Mobius T_y =
        y.is_inf() && h->domain().is_line() ? Mobius::identity() : anchor_map(h->domain(), y);
    const Mobius T_hy =
        hy.is_inf() && h->range().is_line() ? Mobius::identity() : anchor_map(h->range(), hy);
    WeldingPtr H = conjugate(h, T_hy.inverse(), T_y);
    return NormalizedWelding{H, T_y, T_hy};
}

}  // namespace weldnorm

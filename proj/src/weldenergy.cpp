#include "weldnorm/weldenergy.hpp"

#include <algorithm>
#include <cmath>

#include "weldnorm/io.hpp"

namespace weldnorm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double L(const Welding& h, const ExtComplex& x, const ExtComplex& y) {
    for (const auto& k : h.knots())
        if (spherical_dist(x, k) < 1e-13) throw KnotPoint("L evaluated at a knot of h");
    if (x.is_inf()) throw KnotPoint("L evaluated at x = infinity");
    const ExtComplex hy = h.eval(y);
    if (spherical_dist(x, y) < 1e-14) {
        return std::log(h.derivative(x));
    }
    const ExtComplex hx = h.eval(x);
    const double hp = h.derivative(x);
    double val = -std::log(hp);
    if (!y.is_inf()) val -= 2.0 * std::log(std::abs(x.value() - y.value()));
    if (!hy.is_inf() && hx.finite()) val += 2.0 * std::log(std::abs(hx.value() - hy.value()));
    return val;
}

namespace {

// Fast angle-space evaluator of L_h(., y) used by the quadrature; avoids the
// per-sample knot scan of the public L().
struct LEvaluator {
    const Welding* h;
    CircularChart chart;
    bool y_inf, hy_inf;
    Complex yv, hyv;

    LEvaluator(const Welding& hh, const ExtComplex& y)
        : h(&hh), chart(hh.domain()), y_inf(y.is_inf()), yv(y.is_inf() ? Complex(0) : y.value()) {
        const ExtComplex hy = hh.eval(y);
        hy_inf = hy.is_inf();
        hyv = hy_inf ? Complex(0) : hy.value();
    }

    double operator()(double theta) const {
        const ExtComplex x = chart.point(theta);
        if (x.is_inf()) return 0.0;  // measure-zero chart point between panels
        const ExtComplex hx = h->eval(x);
        const double hp = h->derivative(x);
        double val = -std::log(hp);
        if (!y_inf) val -= 2.0 * std::log(std::abs(x.value() - yv));
        if (!hy_inf && hx.finite()) val += 2.0 * std::log(std::abs(hx.value() - hyv));
        return val;
    }
};

EnergyReport K_impl(const WeldingPtr& h, const ExtComplex& y, const QuadratureConfig& cfg) {
    LEvaluator ev(*h, y);
    std::vector<double> knots;
    for (const auto& k : h->knots()) knots.push_back(ev.chart.angle(k));
    if (h->domain().contains(y, 1e-8)) knots.push_back(ev.chart.angle(y));
    QuadratureDiagnostics diag;
    auto fn = std::function<double(double)>(ev);
    const double v = detail::seminorm_core(fn, fn, true, std::move(knots), cfg, &diag);
    EnergyReport rep;
    rep.value = v;
    rep.root = y;
    rep.converged = diag.converged;
    rep.divergent = diag.divergent;
    rep.doublings = diag.doublings;
    rep.final_rel_change = diag.final_rel_change;
    return rep;
}

}  // namespace

EnergyReport K(const WeldingPtr& h, const ExtComplex& y, const QuadratureConfig& cfg) {
    return K_impl(h, y, cfg);
}

EnergyReport W(const WeldingPtr& h, const ExtComplex& y, const QuadratureConfig& cfg) {
    const EnergyReport k1 = K_impl(h, y, cfg);
    const EnergyReport k2 = K_impl(h->inverse(), h->eval(y), cfg);
    EnergyReport rep;
    rep.root = y;
    rep.value = k1.value + k2.value;  // finite + inf = inf
    rep.converged = k1.converged && k2.converged;
    rep.divergent = k1.divergent || k2.divergent;
    rep.doublings = std::max(k1.doublings, k2.doublings);
    rep.final_rel_change = std::max(k1.final_rel_change, k2.final_rel_change);
    return rep;
}

std::vector<ExtComplex> scan_mesh(double lo, double hi, double step, bool with_infinity) {
    std::vector<ExtComplex> roots;
    const long long n = std::llround((hi - lo) / step);
    for (long long i = 0; i <= n; ++i) roots.push_back(ExtComplex(lo + step * i));
    if (with_infinity) roots.push_back(ExtComplex::infinity());
    return roots;
}

std::vector<ScanRow> W_scan(const WeldingPtr& h, const std::vector<ExtComplex>& roots,
                            const QuadratureConfig& cfg) {
    std::vector<ScanRow> rows(roots.size());
    const WeldingPtr hinv = h->inverse();
#pragma omp parallel for schedule(dynamic) if (cfg.threads != 1)
    for (long long i = 0; i < static_cast<long long>(roots.size()); ++i) {
        QuadratureConfig inner = cfg;
        inner.threads = 1;  // parallel over roots; panels serial within each root
        ScanRow row;
        row.y = roots[static_cast<std::size_t>(i)];
        try {
            row.k_h = K_impl(h, row.y, inner);
            row.k_hinv = K_impl(hinv, h->eval(row.y), inner);
            row.w = row.k_h.value + row.k_hinv.value;
        } catch (const std::exception&) {
            row.w = std::numeric_limits<double>::quiet_NaN();
        }
        rows[static_cast<std::size_t>(i)] = row;
    }
    return rows;
}

std::pair<double, double> refine_local_max(const WeldingPtr& h, const QuadratureConfig& cfg,
                                           double a, double b, double width) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = W(h, ExtComplex(x1), cfg).value;
    double f2 = W(h, ExtComplex(x2), cfg).value;
    while (b - a > width) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = W(h, ExtComplex(x2), cfg).value;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = W(h, ExtComplex(x1), cfg).value;
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, std::max(f1, f2)};
}

namespace {
std::pair<double, double> refine_local_min(const WeldingPtr& h, const QuadratureConfig& cfg,
                                           double a, double b, double width) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = W(h, ExtComplex(x1), cfg).value;
    double f2 = W(h, ExtComplex(x2), cfg).value;
    while (b - a > width) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = W(h, ExtComplex(x2), cfg).value;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = W(h, ExtComplex(x1), cfg).value;
        }
    }
    return {0.5 * (a + b), std::min(f1, f2)};
}
}  // namespace

Extrema W_extrema(const WeldingPtr& h, const QuadratureConfig& cfg, double window_lo,
                  double window_hi, double mesh, double refine_width) {
    const auto roots = scan_mesh(window_lo, window_hi, mesh, true);
    const auto rows = W_scan(h, roots, cfg);
    Extrema ex;
    double best_max = -kInf, best_min = kInf;
    std::size_t imax = 0, imin = 0;
    std::size_t finite_count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double w = rows[i].w;
        if (std::isnan(w)) continue;
        if (std::isinf(w)) continue;
        ++finite_count;
        if (w > best_max) {
            best_max = w;
            imax = i;
        }
        if (w < best_min) {
            best_min = w;
            imin = i;
        }
    }
    if (finite_count == 0) {
        ex.divergent = true;
        ex.w_upper = ex.w_lower = ex.gap = kInf;
        return ex;
    }
    ex.argmax = rows[imax].y;
    ex.argmin = rows[imin].y;
    ex.w_upper = best_max;
    ex.w_lower = best_min;
    // golden-section refinement when the extremum is interior to the window mesh
    if (rows[imax].y.finite() && imax > 0 && imax + 2 < rows.size()) {
        const auto [ym, wm] = refine_local_max(h, cfg, rows[imax - 1].y.value().real(),
                                               rows[imax + 1].y.value().real(), refine_width);
        if (wm > ex.w_upper) {
            ex.w_upper = wm;
            ex.argmax = ExtComplex(ym);
        }
    }
    if (rows[imin].y.finite() && imin > 0 && imin + 2 < rows.size()) {
        const auto [ym, wm] = refine_local_min(h, cfg, rows[imin - 1].y.value().real(),
                                               rows[imin + 1].y.value().real(), refine_width);
        if (wm < ex.w_lower) {
            ex.w_lower = wm;
            ex.argmin = ExtComplex(ym);
        }
    }
    ex.gap = ex.w_upper - ex.w_lower;
    return ex;
}

CompositionBoundReport composition_bound_check(const WeldingPtr& h1, const WeldingPtr& h2,
                                               double K1, double K2, const ExtComplex& y,
                                               const QuadratureConfig& cfg) {
    if (K1 < 1.0 || K2 < 1.0) throw std::invalid_argument("quasicircle constants must be >= 1");
    CompositionBoundReport rep;
    rep.lhs = W(compose(h1, h2), y, cfg).value;
    rep.w1 = W(h1, h2->eval(y), cfg).value;
    rep.w2 = W(h2, y, cfg).value;
    const double c2 = K2 * K2 + 1.0 / (K2 * K2);
    const double c1 = K1 * K1 + 1.0 / (K1 * K1);
    rep.rhs = 2.0 * c2 * rep.w1 + 2.0 * c1 * rep.w2;
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

std::vector<EntropyRow> entropy_scan(const WeldingPtr& h, int n_max, double Kcert,
                                     const QuadratureConfig& cfg) {
    if (n_max < 1) throw std::invalid_argument("entropy_scan: n_max must be >= 1");
    if (Kcert < 1.0) throw std::invalid_argument("entropy_scan: K must be >= 1");
    const auto inf = ExtComplex::infinity();
    if (spherical_dist(h->eval(inf), inf) > 1e-8)
        throw std::invalid_argument("entropy_scan: welding must fix infinity (normalize first)");
    const double ck = Kcert * Kcert + 1.0 / (Kcert * Kcert);
    std::vector<EntropyRow> rows;
    WeldingPtr hn = h;
    double w1 = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) hn = compose(h, hn);
        EntropyRow row;
        row.n = n;
        row.w_n = W(hn, inf, cfg).value;
        if (n == 1) w1 = row.w_n;
        row.bound = 2.0 * (n + 2) * std::pow(ck, n - 1) * w1;
        row.slope = row.w_n > 0 ? std::log(row.w_n) / n : -kInf;
        rows.push_back(row);
        if (const auto pm = std::dynamic_pointer_cast<const PiecewiseMobius>(hn);
            pm && pm->branch_count() > 4096)
            throw std::runtime_error("entropy_scan: knot count blow-up");
    }
    return rows;
}

ComparableReport comparable_check(const WeldingPtr& h, double I_L, double Kcert,
                                  const ExtComplex& y, const QuadratureConfig& cfg) {
    if (Kcert < 1.0) throw std::invalid_argument("comparable_check: K must be >= 1");
    ComparableReport rep;
    rep.w = W(h, y, cfg).value;
    const double ck = Kcert * Kcert + 1.0 / (Kcert * Kcert);
    rep.lower = 0.5 * (3.0 + 1.0 / ck) * I_L;
    rep.upper = 0.5 * (3.0 + ck) * I_L;
    rep.universal = 1.5 * I_L;
    rep.lower_ok = rep.lower <= rep.w;
    rep.upper_ok = rep.w <= rep.upper;
    rep.universal_ok = rep.universal <= rep.w;
    return rep;
}

std::string scan_to_csv(const std::vector<ScanRow>& rows) {
    std::string out = "y_re,y_im,K_h,K_hinv,W,converged,panel_doublings\n";
    for (const auto& r : rows) {
        if (r.y.is_inf()) {
            out += "inf,inf,";
        } else {
            out += format_double(r.y.value().real());
            out += ',';
            out += format_double(r.y.value().imag());
            out += ',';
        }
        out += format_double(r.k_h.value);
        out += ',';
        out += format_double(r.k_hinv.value);
        out += ',';
        out += format_double(r.w);
        out += ',';
        out += (r.k_h.converged && r.k_hinv.converged) ? "1" : "0";
        out += ',';
        out += std::to_string(std::max(r.k_h.doublings, r.k_hinv.doublings));
        out += '\n';
    }
    return out;
}

}  // namespace weldnorm

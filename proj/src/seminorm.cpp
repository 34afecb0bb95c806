#include "weldnorm/seminorm.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "weldnorm/gauss.hpp"
#include "weldnorm/quad2d.hpp"

namespace weldnorm {

namespace {
const double kTwoPi = 2.0 * kPi;
const double kPrefactor = 1.0 / (4.0 * kPi * kPi);

double wrap(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0 ? t + kTwoPi : t;
}
}  // namespace

void QuadratureConfig::validate() const {
    if (gauss_order < 2) throw std::invalid_argument("gauss_order must be >= 2");
    if (panels_per_interval < 1) throw std::invalid_argument("panels_per_interval must be >= 1");
    if (!(diagonal_offset > 0.0 && diagonal_offset < 1.0))
        throw std::invalid_argument("diagonal_offset must lie in (0, panel width)");
    if (!(target_rel_tol > 0.0)) throw std::invalid_argument("target_rel_tol must be positive");
    if (max_doublings < 1) throw std::invalid_argument("max_doublings must be >= 1");
}

BoundaryFunction::BoundaryFunction(Cline domain, std::function<double(const ExtComplex&)> f,
                                   std::vector<ExtComplex> knots)
    : domain_(domain), chart_(domain), f_(std::move(f)), knots_(std::move(knots)) {}

std::vector<double> BoundaryFunction::knot_angles() const {
    std::vector<double> a;
    a.reserve(knots_.size());
    for (const auto& k : knots_) a.push_back(chart_.angle(k));
    return a;
}

namespace detail {

namespace {

using Eval = std::function<double(double)>;

struct Workspace {
    GaussRule base;   // order g
    GaussRule shift;  // interlaced order g+1 grid for coincident panels
};

struct Block {
    // tensor Gauss block of the kernel (u(a)-u(b))(v(a)-v(b)) / (4 sin^2((a-b)/2))
    static double eval(const Eval& u, const Eval& v, bool same_fn, double a0, double a1, double b0,
                       double b1, const GaussRule& ra, const GaussRule& rb, long long* evals) {
        const int na = static_cast<int>(ra.x.size());
        const int nb = static_cast<int>(rb.x.size());
        double ua[24], va[24], ub[25], vb[25];
        for (int i = 0; i < na; ++i) {
            const double t = a0 + (a1 - a0) * ra.x[i];
            ua[i] = u(wrap(t));
            va[i] = same_fn ? ua[i] : v(wrap(t));
        }
        for (int j = 0; j < nb; ++j) {
            const double t = b0 + (b1 - b0) * rb.x[j];
            ub[j] = u(wrap(t));
            vb[j] = same_fn ? ub[j] : v(wrap(t));
        }
        if (evals) *evals += na + nb;
        double total = 0.0;
        for (int i = 0; i < na; ++i) {
            const double ta = a0 + (a1 - a0) * ra.x[i];
            double row = 0.0;
            for (int j = 0; j < nb; ++j) {
                const double tb = b0 + (b1 - b0) * rb.x[j];
                const double s = std::sin(0.5 * (ta - tb));
                row += rb.w[j] * (ua[i] - ub[j]) * (va[i] - vb[j]) / (4.0 * s * s);
            }
            total += ra.w[i] * row;
        }
        return total * (a1 - a0) * (b1 - b0) * kPrefactor;
    }

    // same, from cached node values (separated pairs; order-g grids on both axes)
    static double cached(const std::vector<double>& ua, const std::vector<double>& va,
                         const std::vector<double>& ub, const std::vector<double>& vb, double a0,
                         double a1, double b0, double b1, const GaussRule& r) {
        const int n = static_cast<int>(r.x.size());
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ta = a0 + (a1 - a0) * r.x[i];
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                const double tb = b0 + (b1 - b0) * r.x[j];
                const double s = std::sin(0.5 * (ta - tb));
                row += r.w[j] * (ua[i] - ub[j]) * (va[i] - vb[j]) / (4.0 * s * s);
            }
            total += r.w[i] * row;
        }
        return total * (a1 - a0) * (b1 - b0) * kPrefactor;
    }
};

struct RefineResult {
    double value = 0.0;
    bool stubborn = false;  // hit the depth cap with non-contracting increments
};

// Adaptive dyadic refinement of a touching pair. Children are pruned as soon as
// one subdivision stops changing them; only children that still touch the
// shared corner (or the diagonal) recurse. A chain whose increments fail to
// contract by the depth cap marks the pair as a divergence suspect.
RefineResult refine_box(const Eval& u, const Eval& v, bool same_fn, double a0, double a1, double b0,
                        double b1, bool equal, int depth, double parent_inc, double scale,
                        const QuadratureConfig& cfg, const Workspace& ws, long long* evals) {
    const double v0 =
        Block::eval(u, v, same_fn, a0, a1, b0, b1, ws.base, equal ? ws.shift : ws.base, evals);
    const double am = 0.5 * (a0 + a1), bm = 0.5 * (b0 + b1);
    struct Kid {
        double a0, a1, b0, b1, val;
        bool eq, touch;
    };
    Kid kids[4] = {{a0, am, b0, bm, 0, false, false},
                   {a0, am, bm, b1, 0, false, false},
                   {am, a1, b0, bm, 0, false, false},
                   {am, a1, bm, b1, 0, false, false}};
    double v1 = 0.0;
    for (Kid& k : kids) {
        k.eq = std::abs(k.a0 - k.b0) < 1e-15 && std::abs(k.a1 - k.b1) < 1e-15;
        k.touch = k.eq || std::abs(k.a1 - k.b0) < 1e-14 || std::abs(k.b1 - k.a0) < 1e-14;
        k.val = Block::eval(u, v, same_fn, k.a0, k.a1, k.b0, k.b1, ws.base,
                            k.eq ? ws.shift : ws.base, evals);
        v1 += k.val;
    }
    const double inc = std::abs(v1 - v0);
    if (inc <= std::max(0.25 * cfg.target_rel_tol * std::abs(v1), 1e-16 * scale)) return {v1, false};
    if (depth >= cfg.max_pair_depth) return {v1, inc > 0.7 * parent_inc};
    double total = 0.0;
    bool stubborn = false;
    for (const Kid& k : kids) {
        if (k.touch) {
            const auto r = refine_box(u, v, same_fn, k.a0, k.a1, k.b0, k.b1, k.eq, depth + 1, inc,
                                      scale, cfg, ws, evals);
            total += r.value;
            stubborn = stubborn || r.stubborn;
        } else {
            total += k.val;
        }
    }
    return {total, stubborn};
}

RefineResult refine_touching(const Eval& u, const Eval& v, bool same_fn, double A0, double A1,
                             double B0, double B1, bool equal, const QuadratureConfig& cfg,
                             const Workspace& ws, long long* evals) {
    const double v0 =
        Block::eval(u, v, same_fn, A0, A1, B0, B1, ws.base, equal ? ws.shift : ws.base, evals);
    const double scale = std::abs(v0) + 1e-300;
    return refine_box(u, v, same_fn, A0, A1, B0, B1, equal, 0,
                      std::numeric_limits<double>::infinity(), scale, cfg, ws, evals);
}

struct RunResult {
    double value = 0.0;
    int stubborn = 0;
};

RunResult run_once(const Eval& u, const Eval& v, bool same_fn, const std::vector<double>& knots,
                   int panels_per_interval, const QuadratureConfig& cfg, const Workspace& ws,
                   long long* evals) {
    // circular partition: each knot interval split uniformly
    std::vector<double> ks = knots;
    for (double& t : ks) t = wrap(t);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end(),
                         [](double a, double b) { return b - a < 1e-9; }),
             ks.end());
    if (ks.size() >= 2 && (ks.front() + kTwoPi) - ks.back() < 1e-9) ks.pop_back();
    if (ks.empty()) ks.push_back(0.0);

    std::vector<double> lo, hi;
    const std::size_t m = ks.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double a = ks[i];
        double b = (m == 1) ? ks[0] + kTwoPi : ks[(i + 1) % m];
        if (b <= a) b += kTwoPi;
        for (int j = 0; j < panels_per_interval; ++j) {
            lo.push_back(a + (b - a) * j / panels_per_interval);
            hi.push_back(a + (b - a) * (j + 1) / panels_per_interval);
        }
    }
    const std::size_t n = lo.size();

    // cache node values per panel
    const int g = static_cast<int>(ws.base.x.size());
    std::vector<std::vector<double>> uc(n), vc(n);
    for (std::size_t i = 0; i < n; ++i) {
        uc[i].resize(g);
        if (!same_fn) vc[i].resize(g);
    }
    std::exception_ptr eptr;
#pragma omp parallel for schedule(static) if (cfg.threads != 1)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        if (eptr) continue;
        try {
            const std::size_t i = static_cast<std::size_t>(ii);
            for (int k = 0; k < g; ++k) {
                const double t = wrap(lo[i] + (hi[i] - lo[i]) * ws.base.x[k]);
                uc[i][k] = u(t);
                if (!same_fn) vc[i][k] = v(t);
                if (!std::isfinite(uc[i][k]) || (!same_fn && !std::isfinite(vc[i][k]))) {
                    throw NonFiniteSample("boundary function returned a non-finite sample");
                }
            }
        } catch (...) {
#pragma omp critical
            if (!eptr) eptr = std::current_exception();
        }
    }
    if (eptr) std::rethrow_exception(eptr);
    if (evals) *evals += static_cast<long long>(n) * g * (same_fn ? 1 : 2);

    // enumerate unordered pairs i <= j; p < n touching pairs get refinement
    struct Pair {
        std::uint32_t i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i; j < n; ++j) pairs.push_back({i, j});

    std::vector<double> contrib(pairs.size());
    std::vector<unsigned char> stub(pairs.size(), 0);
    const auto& va_ref = same_fn ? uc : vc;
#pragma omp parallel for schedule(dynamic, 16) if (cfg.threads != 1) \
    num_threads(cfg.threads > 1 ? cfg.threads : omp_get_max_threads())
    for (long long k = 0; k < static_cast<long long>(pairs.size()); ++k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        const bool equal = i == j;
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1 && n > 1);
        long long local_evals = 0;
        double val;
        bool flag = false;
        if (equal || adjacent) {
            // contiguize the wrap pair so the refinement's touch logic sees neighbors
            double a0 = lo[i], a1 = hi[i], b0 = lo[j], b1 = hi[j];
            if (i == 0 && j == n - 1 && n > 1) {
                a0 += kTwoPi;
                a1 += kTwoPi;
            }
            const auto r = refine_touching(u, v, same_fn, a0, a1, b0, b1, equal, cfg, ws, &local_evals);
            val = r.value;
            flag = r.stubborn;
        } else {
            val = Block::cached(uc[i], va_ref[i], uc[j], va_ref[j], lo[i], hi[i], lo[j], hi[j], ws.base);
        }
        contrib[static_cast<std::size_t>(k)] = equal ? val : 2.0 * val;
        stub[static_cast<std::size_t>(k)] = flag ? 1 : 0;
        if (evals) {
#pragma omp atomic
            *evals += local_evals;
        }
    }
    RunResult out;
    out.value = pairwise_sum(contrib);
    for (auto s : stub) out.stubborn += s;
    return out;
}

}  // namespace

double seminorm_core(const Eval& u, const Eval& v, bool same_fn, std::vector<double> knot_angles,
                     const QuadratureConfig& cfg, QuadratureDiagnostics* diag) {
    cfg.validate();
    Workspace ws{gauss_legendre_01(std::min(cfg.gauss_order, 23)),
                 gauss_legendre_01(std::min(cfg.gauss_order, 23) + 1)};
    long long evals = 0;
    std::vector<double> vals;
    int streak = 0;
    double rel = std::numeric_limits<double>::quiet_NaN();
    RunResult rr;
    for (int d = 0; d <= cfg.max_doublings; ++d) {
        rr = run_once(u, v, same_fn, knot_angles, cfg.panels_per_interval << d, cfg, ws, &evals);
        vals.push_back(rr.value);
        if (d > 0) {
            const double inc = vals[d] - vals[d - 1];
            rel = std::abs(inc) / std::max(std::abs(vals[d]), 1e-300);
            if (rel <= cfg.target_rel_tol && rr.stubborn == 0) {
                if (diag) *diag = {true, false, d, rel, rr.stubborn, evals};
                return vals[d];
            }
            streak = (inc > cfg.divergence_growth * std::abs(vals[d - 1])) ? streak + 1 : 0;
            if (streak >= cfg.divergence_streak) {
                if (diag) *diag = {false, true, d, rel, rr.stubborn, evals};
                return std::numeric_limits<double>::infinity();
            }
            if (d == cfg.max_doublings && d >= 2) {
                const double i1 = std::abs(vals[d - 1] - vals[d - 2]);
                const double i2 = std::abs(vals[d] - vals[d - 1]);
                const bool growing = vals[d] > vals[d - 1];
                if (growing && i2 > 0.7 * i1) {
                    // grows without Cauchy convergence at the target tolerance
                    if (diag) *diag = {false, true, d, rel, rr.stubborn, evals};
                    return std::numeric_limits<double>::infinity();
                }
            }
        }
    }
    if (diag) *diag = {false, false, cfg.max_doublings, rel, rr.stubborn, evals};
    return vals.back();
}

}  // namespace detail

double h_half_seminorm_sq(const BoundaryFunction& u, const QuadratureConfig& cfg,
                          QuadratureDiagnostics* diag) {
    auto ev = [&u](double t) { return u.eval_angle(t); };
    return detail::seminorm_core(ev, ev, true, u.knot_angles(), cfg, diag);
}

double h_half_inner(const BoundaryFunction& u, const BoundaryFunction& v,
                    const QuadratureConfig& cfg, QuadratureDiagnostics* diag) {
    if (u.domain().is_line() != v.domain().is_line())
        throw DomainMismatch("h_half_inner: functions on different clines");
    auto eu = [&u](double t) { return u.eval_angle(t); };
    auto evv = [&v](double t) { return v.eval_angle(t); };
    std::vector<double> ks = u.knot_angles();
    for (double a : v.knot_angles()) ks.push_back(a);
    return detail::seminorm_core(eu, evv, false, std::move(ks), cfg, diag);
}

BoundaryFunction transport_to_circle(const BoundaryFunction& u) {
    if (!u.domain().is_line() && u.domain().contains(ExtComplex(1.0)) &&
        u.domain().contains(ExtComplex(0.0, 1.0)))
        return u;  // already on S^1
    CircularChart chart(u.domain());
    auto f = [u, chart](const ExtComplex& w) {
        return u(chart.point(std::arg(w.value())));
    };
    std::vector<ExtComplex> knots;
    const CircularChart& ch = chart;
    for (const auto& k : u.knots()) knots.push_back(ExtComplex(std::polar(1.0, ch.angle(k))));
    return BoundaryFunction(Cline::unit_circle(), std::move(f), std::move(knots));
}

BoundaryFunction pullback(const BoundaryFunction& u, const WeldingPtr& h) {
    auto f = [u, h](const ExtComplex& x) { return u(h->eval(x)); };
    std::vector<ExtComplex> knots;
    for (const auto& k : u.knots()) knots.push_back(h->eval_inverse(k));
    for (const auto& k : h->knots()) knots.push_back(k);
    return BoundaryFunction(h->domain(), std::move(f), std::move(knots));
}

double dirichlet_energy_halfplane(const std::function<Complex(Complex)>& grad,
                                  const QuadratureConfig& cfg, QuadratureDiagnostics* diag) {
    // transport to the unit disk: D_H(F) = (1/2pi) \int_D |grad F(C^{-1}w)|^2 |(C^{-1})'(w)|^2 dA
    const Mobius cinv = Mobius::cayley().inverse();
    auto integrand = [&grad, cinv](Complex w) -> double {
        const ExtComplex z = cinv(ExtComplex(w));
        if (z.is_inf() || z.value().imag() <= 0.0) return 0.0;
        const ExtComplex d = cinv.derivative(ExtComplex(w));
        if (d.is_inf()) return 0.0;
        const Complex gv = grad(z.value());
        return std::norm(gv) * std::norm(d.value());
    };
    return disk_integral(integrand, cfg, diag) / (2.0 * kPi);
}

}  // namespace weldnorm

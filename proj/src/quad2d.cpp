#include "weldnorm/quad2d.hpp"

#include <cmath>
#include <vector>

#include "weldnorm/gauss.hpp"
#include "weldnorm/seminorm.hpp"

namespace weldnorm {

namespace {

// radial strip [r0, r1] x full angle grid; returns sum of F(r e^{it}) r dr dt
double strip(const std::function<double(Complex)>& F, double r0, double r1, const GaussRule& gr,
             int ntheta, const QuadratureConfig& cfg) {
    const double dth = 2.0 * kPi / ntheta;
    const int g = static_cast<int>(gr.x.size());
    std::vector<double> cell(static_cast<std::size_t>(ntheta));
#pragma omp parallel for schedule(static) if (cfg.threads != 1)
    for (int k = 0; k < ntheta; ++k) {
        const double th = (k + 0.5) * dth;
        const Complex dir = std::polar(1.0, th);
        double s = 0.0;
        for (int i = 0; i < g; ++i) {
            const double r = r0 + (r1 - r0) * gr.x[i];
            s += gr.w[i] * F(r * dir) * r;
        }
        cell[static_cast<std::size_t>(k)] = s * (r1 - r0) * dth;
    }
    return pairwise_sum(cell);
}

double run_once(const std::function<double(Complex)>& F, int radial_panels, int ntheta,
                const QuadratureConfig& cfg, const GaussRule& gr) {
    const double delta = cfg.boundary_delta;
    const double rmax = 1.0 - delta;
    std::vector<double> parts;
    for (int p = 0; p < radial_panels; ++p)
        parts.push_back(strip(F, rmax * p / radial_panels, rmax * (p + 1) / radial_panels, gr, ntheta, cfg));
    double bulk = pairwise_sum(parts);
    // boundary layer: halve the remaining sliver until its share is negligible
    double lo = rmax;
    double total = bulk;
    for (int m = 0; m < 48; ++m) {
        const double width = (1.0 - lo) * 0.5;
        const double layer = strip(F, lo, lo + width, gr, ntheta, cfg);
        total += layer;
        lo += width;
        if (std::abs(layer) < 0.05 * cfg.target_rel_tol * std::max(std::abs(total), 1e-300)) {
            // close out the last sliver with a single panel
            total += strip(F, lo, 1.0, gr, ntheta, cfg);
            return total;
        }
    }
    total += strip(F, lo, 1.0, gr, ntheta, cfg);
    return total;
}

}  // namespace

double disk_integral(const std::function<double(Complex)>& F, const QuadratureConfig& cfg,
                     QuadratureDiagnostics* diag) {
    cfg.validate();
    const GaussRule gr = gauss_legendre_01(std::min(cfg.gauss_order, 23));
    int radial_panels = std::max(4, cfg.panels_per_interval / 2);
    int ntheta = std::max(64, 8 * cfg.panels_per_interval);
    std::vector<double> vals;
    int streak = 0;
    double rel = std::numeric_limits<double>::quiet_NaN();
    for (int d = 0; d <= cfg.max_doublings; ++d) {
        vals.push_back(run_once(F, radial_panels << d, ntheta << d, cfg, gr));
        if (d > 0) {
            const double inc = vals[d] - vals[d - 1];
            rel = std::abs(inc) / std::max(std::abs(vals[d]), 1e-300);
            if (rel <= cfg.target_rel_tol) {
                if (diag) *diag = {true, false, d, rel, 0, 0};
                return vals[d];
            }
            streak = (inc > cfg.divergence_growth * std::abs(vals[d - 1])) ? streak + 1 : 0;
            if (streak >= cfg.divergence_streak) {
                if (diag) *diag = {false, true, d, rel, 0, 0};
                return std::numeric_limits<double>::infinity();
            }
            if (d == cfg.max_doublings && d >= 2) {
                const double i1 = std::abs(vals[d - 1] - vals[d - 2]);
                const double i2 = std::abs(vals[d] - vals[d - 1]);
                if (vals[d] > vals[d - 1] && i2 > 0.7 * i1) {
                    if (diag) *diag = {false, true, d, rel, 0, 0};
                    return std::numeric_limits<double>::infinity();
                }
            }
        }
    }
    if (diag) *diag = {false, false, cfg.max_doublings, rel, 0, 0};
    return vals.back();
}

}  // namespace weldnorm

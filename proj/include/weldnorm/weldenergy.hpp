#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weldnorm/seminorm.hpp"
#include "weldnorm/welding.hpp"

namespace weldnorm {

struct KnotPoint : std::domain_error {
    using std::domain_error::domain_error;
};

/// One rooted-energy evaluation with its convergence diagnostics.
struct EnergyReport {
    double value = 0.0;  // +infinity sentinel when divergent
    ExtComplex root;
    bool converged = false;
    bool divergent = false;
    int doublings = 0;
    double final_rel_change = 0.0;

    bool finite() const { return std::isfinite(value); }
};

/// Pointwise welding functional
///   L_h(x,y) = log |(h(x)-h(y))^2 / (h'(x) (x-y)^2)|,
/// with the factor containing an infinite quantity among {y, h(y)} replaced by 1,
/// and L_h(x,x) = log|h'(x)|. Throws KnotPoint when x is a knot of h.
double L(const Welding& h, const ExtComplex& x, const ExtComplex& y);

/// K_h(y): squared H^{1/2} seminorm of x -> L_h(x,y) over the domain cline.
EnergyReport K(const WeldingPtr& h, const ExtComplex& y, const QuadratureConfig& cfg);

/// W_h(y) = K_h(y) + K_{h^{-1}}(h(y)).
EnergyReport W(const WeldingPtr& h, const ExtComplex& y, const QuadratureConfig& cfg);

struct ScanRow {
    ExtComplex y;
    EnergyReport k_h, k_hinv;
    double w = 0.0;
};

/// One report per root, in input order; per-root failures are recorded and the
/// scan continues.
std::vector<ScanRow> W_scan(const WeldingPtr& h, const std::vector<ExtComplex>& roots,
                            const QuadratureConfig& cfg);

std::vector<ExtComplex> scan_mesh(double lo, double hi, double step, bool with_infinity = true);

struct Extrema {
    double w_upper = 0.0, w_lower = 0.0, gap = 0.0;
    ExtComplex argmax, argmin;
    bool divergent = false;
};

/// Coarse scan over the window plus the root at infinity, then golden-section
/// refinement of the bracketed extrema down to `refine_width`.
Extrema W_extrema(const WeldingPtr& h, const QuadratureConfig& cfg, double window_lo = -1.5,
                  double window_hi = 5.5, double mesh = 0.05, double refine_width = 1e-3);

/// Golden-section maximizer of y -> W_h(y) on [a, b] (assumes a bracketed peak).
std::pair<double, double> refine_local_max(const WeldingPtr& h, const QuadratureConfig& cfg,
                                           double a, double b, double width);

struct CompositionBoundReport {
    double lhs = 0.0;    // W_{h1 o h2}(y)
    double rhs = 0.0;    // 2(K2^2+K2^-2) W_{h1}(h2(y)) + 2(K1^2+K1^-2) W_{h2}(y)
    double slack = 0.0;  // rhs - lhs; negative flags inconsistent K certificates
    double w1 = 0.0, w2 = 0.0;
};

CompositionBoundReport composition_bound_check(const WeldingPtr& h1, const WeldingPtr& h2,
                                               double K1, double K2, const ExtComplex& y,
                                               const QuadratureConfig& cfg);

struct EntropyRow {
    int n = 0;
    double w_n = 0.0;    // W_{h^n}(infinity)
    double bound = 0.0;  // 2(n+2)(K^2+K^-2)^{n-1} W_h(infinity)
    double slope = 0.0;  // log(W_{h^n})/n
};

/// Growth of W_{h^n}(infinity) against the induction bound; h must fix infinity.
/// Final column compares the empirical slope with log(K^2 + K^{-2}).
std::vector<EntropyRow> entropy_scan(const WeldingPtr& h, int n_max, double Kcert,
                                     const QuadratureConfig& cfg);

struct ComparableReport {
    double w = 0.0;
    double lower = 0.0;      // (1/2)(3 + 1/(K^2+K^-2)) I_L
    double upper = 0.0;      // (1/2)(3 + K^2+K^-2) I_L
    double universal = 0.0;  // (3/2) I_L
    bool lower_ok = false, upper_ok = false, universal_ok = false;
};

/// Checks lower <= W_h(y) <= upper and the universal bound (3/2) I_L <= W_h(y).
ComparableReport comparable_check(const WeldingPtr& h, double I_L, double Kcert,
                                  const ExtComplex& y, const QuadratureConfig& cfg);

std::string scan_to_csv(const std::vector<ScanRow>& rows);

}  // namespace weldnorm

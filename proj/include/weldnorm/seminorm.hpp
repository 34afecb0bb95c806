#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "weldnorm/sphere.hpp"
#include "weldnorm/welding.hpp"

namespace weldnorm {

struct NonFiniteSample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
    int gauss_order = 12;
    int panels_per_interval = 16;
    double diagonal_offset = 0.5 / 12.0;  // relative node de-duplication scale, in (0,1)
    double target_rel_tol = 1e-4;
    double boundary_delta = 1e-3;  // 2D engine: truncation radius of the bulk polar grid
    int max_doublings = 3;
    int max_pair_depth = 8;
    double divergence_growth = 0.10;  // per-doubling growth flagged toward the sentinel
    int divergence_streak = 3;
    int threads = 1;  // 1: serial, 0: OpenMP default team, n: n threads

    void validate() const;
    std::string to_json() const;
    static QuadratureConfig from_json(const std::string& text);
};

struct QuadratureDiagnostics {
    bool converged = false;
    bool divergent = false;
    int doublings = 0;
    double final_rel_change = std::numeric_limits<double>::quiet_NaN();
    int stubborn_pairs = 0;  // touching pairs still growing at the refinement depth cap
    long long evals = 0;
};

/// Real-valued function on a cline with its non-smooth points (knots).
class BoundaryFunction {
public:
    BoundaryFunction(Cline domain, std::function<double(const ExtComplex&)> f,
                     std::vector<ExtComplex> knots);

    const Cline& domain() const { return domain_; }
    const std::vector<ExtComplex>& knots() const { return knots_; }
    double operator()(const ExtComplex& x) const { return f_(x); }

    double eval_angle(double theta) const { return f_(chart_.point(theta)); }
    std::vector<double> knot_angles() const;

private:
    Cline domain_;
    CircularChart chart_;
    std::function<double(const ExtComplex&)> f_;
    std::vector<ExtComplex> knots_;
};

/// (1/4pi^2) \iint |u(z)-u(w)|^2 / |z-w|^2 |dz||dw| over the domain cline.
/// Returns +infinity when the panel-doubling sequence diverges.
double h_half_seminorm_sq(const BoundaryFunction& u, const QuadratureConfig& cfg,
                          QuadratureDiagnostics* diag = nullptr);

/// (1/4pi^2) \iint (u(z)-u(w))(v(z)-v(w)) / |z-w|^2; polarization-consistent with the seminorm.
double h_half_inner(const BoundaryFunction& u, const BoundaryFunction& v,
                    const QuadratureConfig& cfg, QuadratureDiagnostics* diag = nullptr);

/// u on a line-domain transported to S^1 along the chart Mobius (an isometry).
BoundaryFunction transport_to_circle(const BoundaryFunction& u);

/// u o h with knot set h^{-1}(knots of u) union knots of h.
BoundaryFunction pullback(const BoundaryFunction& u, const WeldingPtr& h);

/// Dirichlet energy (1/2pi) \int_H |grad F|^2 dA of a closed-form harmonic F on the
/// upper half-plane, computed over the Cayley-transported unit disk. `grad` returns
/// the complex gradient (F_x, F_y) as F_x + i F_y at a point of H.
double dirichlet_energy_halfplane(const std::function<Complex(Complex)>& grad,
                                  const QuadratureConfig& cfg,
                                  QuadratureDiagnostics* diag = nullptr);

namespace detail {
/// Angle-space core shared by the seminorm and inner product: evaluators are
/// 2pi-periodic; knot angles delimit the panel intervals.
double seminorm_core(const std::function<double(double)>& u, const std::function<double(double)>& v,
                     bool same_fn, std::vector<double> knot_angles, const QuadratureConfig& cfg,
                     QuadratureDiagnostics* diag);
}  // namespace detail

}  // namespace weldnorm

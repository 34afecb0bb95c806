#pragma once

#include <memory>
#include <string>
#include <vector>

#include "weldnorm/sphere.hpp"

namespace weldnorm {

struct DomainMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Angle coordinate on a cline via a Mobius chart R: S^1 -> C, so that the
/// H^{1/2} transport along the chart is an exact isometry.
class CircularChart {
public:
    explicit CircularChart(const Cline& c);
    double angle(const ExtComplex& z) const;  // in [0, 2pi)
    ExtComplex point(double theta) const;
    const Mobius& chart() const { return to_cline_; }  // S^1 -> cline

private:
    Mobius to_cline_, from_cline_;
};

/// Orientation-preserving circle homeomorphism with evaluation, inverse,
/// derivative, and knot list.
class Welding {
public:
    virtual ~Welding() = default;

    virtual const Cline& domain() const = 0;
    virtual const Cline& range() const = 0;
    virtual ExtComplex eval(const ExtComplex& x) const = 0;
    virtual ExtComplex eval_inverse(const ExtComplex& y) const = 0;
    /// |h'(x)| for finite x with finite h(x) (modulus of the derivative along the cline).
    virtual double derivative(const ExtComplex& x) const = 0;
    virtual std::vector<ExtComplex> knots() const = 0;
    virtual std::shared_ptr<const Welding> inverse() const = 0;
};

using WeldingPtr = std::shared_ptr<const Welding>;

/// Piecewise-Mobius welding: knots in circular order along the domain cline,
/// branch i acting on the arc (knot[i], knot[i+1 mod n]).
class PiecewiseMobius : public Welding, public std::enable_shared_from_this<PiecewiseMobius> {
public:
    /// Validates continuity of branch values at shared knots (1e-10, spherical)
    /// and positive derivative on each arc. Knots need not be pre-sorted.
    PiecewiseMobius(Cline domain, std::vector<ExtComplex> knots, std::vector<Mobius> branches);

    const Cline& domain() const override { return domain_; }
    const Cline& range() const override { return range_; }
    ExtComplex eval(const ExtComplex& x) const override;
    ExtComplex eval_inverse(const ExtComplex& y) const override;
    double derivative(const ExtComplex& x) const override;
    std::vector<ExtComplex> knots() const override { return knots_; }
    std::shared_ptr<const Welding> inverse() const override;

    std::size_t branch_count() const { return branches_.size(); }
    const Mobius& branch(std::size_t i) const { return branches_[i]; }
    const Mobius& branch_at(const ExtComplex& x) const { return branches_[arc_index(x)]; }
    std::size_t arc_index(const ExtComplex& x) const;
    const CircularChart& chart() const { return chart_; }

private:
    Cline domain_, range_;
    CircularChart chart_;
    std::vector<ExtComplex> knots_;       // circular order
    std::vector<double> knot_angles_;     // chart angles of knots_, increasing from knot_angles_[0]
    std::vector<Mobius> branches_;
    mutable std::shared_ptr<const PiecewiseMobius> inverse_cache_;
};

/// Sampled welding: monotone node/value pairs with monotone piecewise-cubic
/// (Fritsch-Carlson) interpolation in chart-angle coordinates.
class SampledWelding : public Welding {
public:
    SampledWelding(Cline domain, Cline range, std::vector<ExtComplex> nodes,
                   std::vector<ExtComplex> values);

    const Cline& domain() const override { return domain_; }
    const Cline& range() const override { return range_; }
    ExtComplex eval(const ExtComplex& x) const override;
    ExtComplex eval_inverse(const ExtComplex& y) const override;
    double derivative(const ExtComplex& x) const override;
    std::vector<ExtComplex> knots() const override;
    std::shared_ptr<const Welding> inverse() const override;

    /// angle -> angle map and its derivative (domain chart to range chart)
    double angle_map(double theta) const;
    double angle_map_derivative(double theta) const;

    const std::vector<double>& node_angles() const { return th_in_; }
    const std::vector<double>& value_angles() const { return th_out_; }
    const std::vector<ExtComplex>& nodes() const { return nodes_; }
    const std::vector<ExtComplex>& values() const { return values_; }

private:
    friend class InvertedSampled;
    Cline domain_, range_;
    CircularChart chart_in_, chart_out_;
    std::vector<ExtComplex> nodes_, values_;
    std::vector<double> th_in_, th_out_, slope_;  // unwrapped angles + Hermite node slopes
    double off_in_ = 0.0, off_out_ = 0.0;
};

WeldingPtr example_h();

WeldingPtr compose(const WeldingPtr& h1, const WeldingPtr& h2);
WeldingPtr conjugate(const WeldingPtr& h, const Mobius& S, const Mobius& T);
WeldingPtr invert(const WeldingPtr& h);
WeldingPtr self_compose(const WeldingPtr& h, int n);
WeldingPtr identity_welding(const Cline& c);
WeldingPtr mobius_welding(const Cline& c, const Mobius& T);

struct NormalizedWelding {
    WeldingPtr welding;  // fixes infinity on R-hat
    Mobius T_y;          // R-hat -> domain(h), T_y(inf) = y
    Mobius T_hy;         // R-hat -> range(h), T_hy(inf) = h(y)
};
/// H := T_{h(y)}^{-1} o h o T_y, an R-hat welding fixing infinity.
NormalizedWelding normalize_fix_infty(const WeldingPtr& h, const ExtComplex& y);

/// JSON (de)serialization; schema:
/// { "domain": "real_line"|"unit_circle", "kind": "piecewise_mobius"|"sampled",
///   "knots": [...], "branches": [[a,b,c,d],...] } or "values" for sampled,
/// complex numbers as [re, im], infinity as "inf". Round-trips bit-exactly.
std::string welding_to_json(const Welding& h);
WeldingPtr welding_from_json(const std::string& text);

}  // namespace weldnorm

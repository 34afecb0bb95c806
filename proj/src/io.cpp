#include "weldnorm/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "weldnorm/seminorm.hpp"
#include "weldnorm/welding.hpp"

namespace weldnorm {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad number: " + s);
    return v;
}

namespace {

using nlohmann::json;

json ext_to_json(const ExtComplex& z) {
    if (z.is_inf()) return json("inf");
    return json::array({z.value().real(), z.value().imag()});
}

ExtComplex ext_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtComplex::infinity();
        throw std::invalid_argument("bad point: " + j.dump());
    }
    if (j.is_number()) return ExtComplex(j.get<double>());
    if (j.is_array() && j.size() == 2)
        return ExtComplex(Complex(j[0].get<double>(), j[1].get<double>()));
    throw std::invalid_argument("bad point: " + j.dump());
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
    throw std::invalid_argument("bad complex: " + j.dump());
}

Cline domain_from_name(const std::string& name) {
    if (name == "real_line") return Cline::real_line();
    if (name == "unit_circle") return Cline::unit_circle();
    throw std::invalid_argument("unknown domain: " + name);
}

std::string domain_name(const Cline& c) {
    if (c.is_line()) return "real_line";
    return "unit_circle";
}

}  // namespace

std::string welding_to_json(const Welding& h) {
    json j;
    j["domain"] = domain_name(h.domain());
    if (const auto* pm = dynamic_cast<const PiecewiseMobius*>(&h)) {
        j["kind"] = "piecewise_mobius";
        json knots = json::array();
        for (const auto& k : pm->knots()) knots.push_back(ext_to_json(k));
        j["knots"] = knots;
        json branches = json::array();
        for (std::size_t i = 0; i < pm->branch_count(); ++i) {
            const Mobius& m = pm->branch(i);
            branches.push_back(json::array({complex_to_json(m.a()), complex_to_json(m.b()),
                                            complex_to_json(m.c()), complex_to_json(m.d())}));
        }
        j["branches"] = branches;
    } else if (const auto* sw = dynamic_cast<const SampledWelding*>(&h)) {
        j["kind"] = "sampled";
        j["range"] = domain_name(sw->range());
        json knots = json::array(), values = json::array();
        for (const auto& k : sw->nodes()) knots.push_back(ext_to_json(k));
        for (const auto& v : sw->values()) values.push_back(ext_to_json(v));
        j["knots"] = knots;
        j["values"] = values;
    } else {
        throw std::invalid_argument("only piecewise_mobius and sampled weldings serialize");
    }
    return j.dump(2);
}

WeldingPtr welding_from_json(const std::string& text) {
    const json j = json::parse(text);
    const Cline domain = domain_from_name(j.at("domain").get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "piecewise_mobius") {
        std::vector<ExtComplex> knots;
        for (const auto& k : j.at("knots")) knots.push_back(ext_from_json(k));
        std::vector<Mobius> branches;
        for (const auto& b : j.at("branches")) {
            if (!b.is_array() || b.size() != 4)
                throw std::invalid_argument("branch must be [a,b,c,d]");
            branches.emplace_back(complex_from_json(b[0]), complex_from_json(b[1]),
                                  complex_from_json(b[2]), complex_from_json(b[3]));
        }
        return std::make_shared<PiecewiseMobius>(domain, std::move(knots), std::move(branches));
    }
    if (kind == "sampled") {
        const Cline range =
            j.contains("range") ? domain_from_name(j.at("range").get<std::string>()) : domain;
        std::vector<ExtComplex> nodes, values;
        for (const auto& k : j.at("knots")) nodes.push_back(ext_from_json(k));
        for (const auto& v : j.at("values")) values.push_back(ext_from_json(v));
        return std::make_shared<SampledWelding>(domain, range, std::move(nodes), std::move(values));
    }
    throw std::invalid_argument("unknown welding kind: " + kind);
}

std::string QuadratureConfig::to_json() const {
    json j;
    j["gauss_order"] = gauss_order;
    j["panels_per_interval"] = panels_per_interval;
    j["diagonal_offset"] = diagonal_offset;
    j["target_rel_tol"] = target_rel_tol;
    j["boundary_delta"] = boundary_delta;
    j["max_doublings"] = max_doublings;
    j["max_pair_depth"] = max_pair_depth;
    j["divergence_growth"] = divergence_growth;
    j["divergence_streak"] = divergence_streak;
    j["threads"] = threads;
    return j.dump(2);
}

QuadratureConfig QuadratureConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    QuadratureConfig c;
    c.gauss_order = j.value("gauss_order", c.gauss_order);
    c.panels_per_interval = j.value("panels_per_interval", c.panels_per_interval);
    c.diagonal_offset = j.value("diagonal_offset", c.diagonal_offset);
    c.target_rel_tol = j.value("target_rel_tol", c.target_rel_tol);
    c.boundary_delta = j.value("boundary_delta", c.boundary_delta);
    c.max_doublings = j.value("max_doublings", c.max_doublings);
    c.max_pair_depth = j.value("max_pair_depth", c.max_pair_depth);
    c.divergence_growth = j.value("divergence_growth", c.divergence_growth);
    c.divergence_streak = j.value("divergence_streak", c.divergence_streak);
    c.threads = j.value("threads", c.threads);
    c.validate();
    return c;
}

}  // namespace weldnorm

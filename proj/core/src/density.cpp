#include "detcount/density.hpp"

#include "detcount/error.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace detcount::density {

namespace {

// Integration starts at this distance from the corner; the cap
// min(a, b, sqrt(a b)) / (a b) bounds what is dropped.
constexpr double kCorner = 0x1p-60;

double corner_bound() { return kCorner * (2.0 + std::log(1.0 / kCorner)); }

std::vector<double> geometric_toward(double base, double span) {
    std::vector<double> out;
    for (int k = 1; k <= 60; ++k) out.push_back(base + std::ldexp(span, -k));
    return out;
}

using Inner = std::function<double(double, double)>;      // (alpha, beta) -> integrand
using Breaks = std::function<std::vector<double>(double)>; // alpha -> inner kinks

detail::QuadResult nested(const Inner& f, const Breaks& inner_breaks, std::vector<double> outer_breaks,
                          double tol) {
    bool inner_ok = true;
    auto g = [&](double a) {
        auto r = detail::integrate_split([&](double b) { return f(a, b); }, kCorner, 1.0, inner_breaks(a), tol / 8);
        inner_ok = inner_ok && r.converged;
        return r.value;
    };
    auto out = detail::integrate_split(g, kCorner, 1.0, std::move(outer_breaks), tol);
    out.converged = out.converged && inner_ok;
    return out;
}

// Runs the nested rule at two tolerance levels and insists they agree.
QuadratureValue converged(const char* what, double tol,
                          const std::function<detail::QuadResult(double)>& rule) {
    if (!(tol >= 1e-8)) throw PreconditionError(std::string(what) + ": tol must be >= 1e-8");
    const double coarse_tol = std::min(1e-10, tol * 1e-2);
    const auto coarse = rule(coarse_tol);
    const auto fine = rule(coarse_tol / 16);
    const double gap = std::abs(fine.value - coarse.value);
    if (!fine.converged || !std::isfinite(fine.value) || gap > tol)
        throw ConvergenceError(std::string(what) + ": refinement moved the result by " + std::to_string(gap));
    return {fine.value, std::max(gap, fine.error) + corner_bound()};
}

// Integral of the trapezoid t -> mu([0, b] cap (t - [0, a])) from -inf to z.
double trapezoid_cdf(double alpha, double beta, double z) {
    const double a = std::min(alpha, beta), b = std::max(alpha, beta);
    if (z <= 0) return 0;
    if (z <= a) return 0.5 * z * z;
    if (z <= b) return 0.5 * a * a + a * (z - a);
    if (z <= a + b) {
        const double w = a + b - z;
        return a * b - 0.5 * w * w;
    }
    return a * b;
}

double area_below(double c) {
    if (c <= 0) return 0;
    if (c >= 1) return 1;
    return c * (1.0 - std::log(c));
}

} // namespace

double dilog(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("dilog: argument must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return kZeta2;
    if (x > 0.5) return kZeta2 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    double term = x, sum = 0;
    for (int n = 1; n < 200; ++n) {
        const double t = term / (static_cast<double>(n) * n);
        sum += t;
        if (t < 1e-18) break;
        term *= x;
    }
    return sum;
}

std::string_view to_string(Branch b) {
    switch (b) {
    case Branch::outside_support: return "outside_support";
    case Branch::origin: return "origin";
    case Branch::below_one: return "below_one";
    case Branch::at_one: return "at_one";
    case Branch::one_to_two: return "one_to_two";
    }
    return "?";
}

ClosedForm J_closed(double l) {
    if (l > 0 && l < 1) {
        const double L = std::log(l);
        return {l * (L * L - 2 * L + 2 - dilog(l)), Branch::below_one};
    }
    if (l == 1) return {2 - kZeta2, Branch::at_one};
    if (l > 1 && l < 2) {
        const double L = std::log(l);
        return {2 + 2 * (l - 1) * (std::log(l - 1) - 1) + l * (kZeta2 - L * L - 2 * dilog(1 / l)), Branch::one_to_two};
    }
    return {0, Branch::outside_support};
}

ClosedForm K_closed(double l) {
    const double x = std::abs(l);
    if (x == 0) return {2, Branch::origin};
    if (x >= 1) return {0, Branch::outside_support};
    const double L = std::log(x);
    return {x * (dilog(x) - kZeta2 + 0.5 * L * L) + (1 - x) * (x * L - std::log1p(-x) + 2), Branch::below_one};
}

ClosedForm sigma_closed(double l) {
    if (l > 0 && l < 1) {
        const double L = std::log(l);
        return {16 - 8 * (1 - l) * std::log1p(-l) +
                    4 * l * (dilog(l) - 2 * (1 + kZeta2) - 2 * l * L + 2 * (1 - l) * L * L),
                Branch::below_one};
    }
    if (l == 1) return {8 - 4 * kZeta2, Branch::at_one};
    if (l > 1 && l < 2) {
        const double L = std::log(l);
        return {8 + 8 * (l - 1) * (std::log(l - 1) - 1) + 4 * l * (kZeta2 - L * L - 2 * dilog(1 / l)),
                Branch::one_to_two};
    }
    const ClosedForm k = K_closed(l);
    return {4 * J_closed(l).value + 8 * k.value, k.branch};
}

QuadratureValue J_quadrature(double l, double tol) {
    if (!std::isfinite(l)) throw PreconditionError("J_quadrature: lambda must be finite");
    if (!(tol >= 1e-8)) throw PreconditionError("J_quadrature: tol must be >= 1e-8");
    if (l <= 0 || l >= 2) return {0, 0};
    const Inner f = [l](double a, double b) {
        const double m = std::min(b, l) - std::max(0.0, l - a);
        return m > 0 ? m / (a * b) : 0.0;
    };
    const Breaks ib = [l](double a) { return std::vector<double>{l, l - a}; };
    std::vector<double> ob = geometric_toward(0, 1);
    ob.push_back(l);
    ob.push_back(l - 1);
    return converged("J_quadrature", tol, [&](double t) { return nested(f, ib, ob, t); });
}

QuadratureValue K_quadrature(double lambda, double tol) {
    if (!std::isfinite(lambda)) throw PreconditionError("K_quadrature: lambda must be finite");
    if (!(tol >= 1e-8)) throw PreconditionError("K_quadrature: tol must be >= 1e-8");
    const double l = std::abs(lambda);
    if (l >= 1) return {0, 0};
    const Inner f = [l](double a, double b) {
        const double m = std::min(a, b + l) - l;
        return m > 0 ? m / (a * b) : 0.0;
    };
    const Breaks ib = [l](double a) { return std::vector<double>{a - l}; };
    std::vector<double> ob = geometric_toward(l, 1 - l);
    if (l > 0) {
        const auto low = geometric_toward(0, 1);
        ob.insert(ob.end(), low.begin(), low.end());
    }
    ob.push_back(l);
    return converged("K_quadrature", tol, [&](double t) { return nested(f, ib, ob, t); });
}

QuadratureValue mollified_density(double lambda, double eta, DensityKind kind, double tol) {
    if (!(eta > 0 && eta <= 1)) throw PreconditionError("mollified_density: eta must lie in (0, 1]");
    if (!std::isfinite(lambda)) throw PreconditionError("mollified_density: lambda must be finite");
    const double lo = (kind == DensityKind::J ? lambda : std::abs(lambda)) - eta;
    const double hi = lo + 2 * eta;
    if (kind == DensityKind::J && (hi <= 0 || lo >= 2)) return {0, 0};
    if (kind == DensityKind::K && lo >= 1) return {0, 0};

    Inner f;
    Breaks ib;
    std::vector<double> ob = geometric_toward(0, 1);
    if (kind == DensityKind::J) {
        f = [=](double a, double b) {
            return (trapezoid_cdf(a, b, hi) - trapezoid_cdf(a, b, lo)) / (2 * eta * a * b);
        };
        ib = [=](double a) { return std::vector<double>{a, lo, hi, lo - a, hi - a}; };
        for (double s : {lo, hi}) ob.insert(ob.end(), {s, s - 1, s / 2});
    } else {
        f = [=](double a, double b) {
            return (trapezoid_cdf(a, b, hi + b) - trapezoid_cdf(a, b, lo + b)) / (2 * eta * a * b);
        };
        ib = [=](double a) { return std::vector<double>{a, a - lo, a - hi, -lo, -hi}; };
        for (double s : {lo, hi}) ob.insert(ob.end(), {s, -s});
    }
    return converged("mollified_density", tol, [&](double t) { return nested(f, ib, ob, t); });
}

double slab_area(double lambda, double eta) {
    if (!(eta > 0)) throw PreconditionError("slab_area: eta must be positive");
    return area_below(lambda + 2 * eta) - area_below(lambda - 2 * eta);
}

std::string_view to_string(Method m) {
    switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::quadrature: return "quadrature";
    case Method::mollified: return "mollified";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "closed" || name == "closed_form") return Method::closed_form;
    if (name == "quadrature") return Method::quadrature;
    if (name == "mollified") return Method::mollified;
    throw PreconditionError("unknown density method '" + std::string(name) + "'");
}

DensityPoint sigma_infinity(double lambda, Method method, const DensityOptions& opts) {
    if (!std::isfinite(lambda)) throw PreconditionError("sigma_infinity: lambda must be finite");
    DensityPoint p;
    p.lambda = lambda;
    p.method = method;
    switch (method) {
    case Method::closed_form: {
        p.J = J_closed(lambda).value;
        p.K = K_closed(lambda).value;
        p.tolerance = 1e-12;
        p.sigma_inf = 4 * p.J + 8 * p.K;
        p.closed_sigma = sigma_closed(lambda).value;
        p.closed_disagreement = std::abs(*p.closed_sigma - p.sigma_inf);
        return p;
    }
    case Method::quadrature: {
        const auto j = J_quadrature(lambda, opts.tol);
        const auto k = K_quadrature(lambda, opts.tol);
        p.J = j.value;
        p.K = k.value;
        p.tolerance = 4 * j.error + 8 * k.error;
        break;
    }
    case Method::mollified: {
        const auto j = mollified_density(lambda, opts.eta, DensityKind::J, opts.tol);
        const auto k = mollified_density(lambda, opts.eta, DensityKind::K, opts.tol);
        p.J = j.value;
        p.K = k.value;
        p.tolerance = 4 * j.error + 8 * k.error;
        p.eta = opts.eta;
        break;
    }
    }
    p.sigma_inf = 4 * p.J + 8 * p.K;
    return p;
}

std::string_view density_csv_header() { return "lambda,J,K,sigma_inf,method,tolerance"; }

std::string to_csv_row(const DensityPoint& p) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.12g,%.12g,%.12g,%s,%.3g", p.lambda, p.J, p.K, p.sigma_inf,
                  std::string(to_string(p.method)).c_str(), p.tolerance);
    return buf;
}

ContinuityReport continuity_modulus_check(double lambda, double delta, double tol) {
    if (!(std::abs(delta) <= 1)) throw PreconditionError("continuity_modulus_check: need |delta| <= 1");
    if (delta == 0) return {lambda, 0, 0, 0};
    const double a = sigma_infinity(lambda, Method::quadrature, {tol, 0}).sigma_inf;
    const double b = sigma_infinity(lambda + delta, Method::quadrature, {tol, 0}).sigma_inf;
    const double ad = std::abs(delta);
    const double lg = std::log(2 / ad);
    return {lambda, delta, std::abs(b - a), ad * lg * lg};
}

std::vector<AdjudicationRow> adjudicate_closed_forms(const std::vector<double>& lambdas, double tol) {
    std::vector<AdjudicationRow> rows;
    for (double l : lambdas) {
        AdjudicationRow r;
        r.lambda = l;
        r.J_quad = J_quadrature(l).value;
        r.K_quad = K_quadrature(l).value;
        r.sigma_quad = 4 * r.J_quad + 8 * r.K_quad;
        r.J_closed = J_closed(l);
        r.K_closed = K_closed(l);
        r.sigma_closed = sigma_closed(l);
        r.J_closed.validated = std::abs(r.J_closed.value - r.J_quad) <= tol;
        r.K_closed.validated = std::abs(r.K_closed.value - r.K_quad) <= tol;
        r.sigma_closed.validated = std::abs(r.sigma_closed.value - r.sigma_quad) <= tol;
        rows.push_back(r);
    }
    return rows;
}

} // namespace detcount::density

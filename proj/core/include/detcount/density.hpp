#pragma once

// Real densities of the additive and difference problems.
//
//   J(l) = int_{(0,1)^2} mu((0, b] cap (l - (0, a])) / (a b) da db
//   K(l) = int_{(0,1)^2} mu([l, b + l] cap [0, a]) / (a b) da db
//   sigma_inf(l) = 4 J(l) + 8 K(l)
//
// Each is available three ways: the published closed forms (evaluated as
// stated, and only trusted once they match quadrature), nested adaptive
// quadrature of the defining integrals, and the eta-mollified slab volumes.

#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace detcount::density {

inline constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

/// Li_2(x) on [0, 1]: power series up to 1/2, reflection above.
double dilog(double x);

enum class Branch { outside_support, origin, below_one, at_one, one_to_two };
std::string_view to_string(Branch b);

struct ClosedForm {
    double value;
    Branch branch;
    /// Set only by adjudicate_closed_forms once the value matches quadrature.
    bool validated = false;
};

/// Piecewise closed form for J as published (0 < l < 1, l = 1, 1 < l < 2, else 0).
ClosedForm J_closed(double lambda);
/// Published closed form for K (K(0) = 2, zero for |l| >= 1, even in l).
ClosedForm K_closed(double lambda);
/// Published combined branch formulas for sigma_inf; 4 J_closed + 8 K_closed off (0,1) u (1,2).
ClosedForm sigma_closed(double lambda);

struct QuadratureValue {
    double value;
    /// Estimated absolute error, including the truncated corner near 0.
    double error;
};

/// Requires tol >= 1e-8. Throws ConvergenceError when two refinement levels
/// disagree by more than tol.
QuadratureValue J_quadrature(double lambda, double tol = 1e-8);
QuadratureValue K_quadrature(double lambda, double tol = 1e-8);

enum class DensityKind { J, K };

/// (2 eta)^{-1} vol{x in (0,1)^4 : |Q_kind(x) - lambda| < eta}, via the exact
/// reduction to a window average of the interval-intersection measure.
QuadratureValue mollified_density(double lambda, double eta, DensityKind kind, double tol = 1e-8);

/// I(l; eta) = area{(x, y) in (0,1]^2 : l - 2 eta < x y < l + 2 eta}.
double slab_area(double lambda, double eta);

enum class Method { closed_form, quadrature, mollified };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct DensityPoint {
    double lambda = 0;
    double J = 0;
    double K = 0;
    double sigma_inf = 0;
    Method method = Method::quadrature;
    double tolerance = 0;
    std::optional<double> eta;
    /// closed_form only: the combined published sigma formula and its gap to 4J + 8K.
    std::optional<double> closed_sigma;
    std::optional<double> closed_disagreement;
};

struct DensityOptions {
    double tol = 1e-8;
    double eta = 1e-3;
};

DensityPoint sigma_infinity(double lambda, Method method, const DensityOptions& opts = {});

/// "lambda,J,K,sigma_inf,method,tolerance"
std::string_view density_csv_header();
std::string to_csv_row(const DensityPoint& p);

struct ContinuityReport {
    double lambda;
    double delta;
    double difference; // |sigma(lambda + delta) - sigma(lambda)|
    double shape;      // |delta| log^2(2 / |delta|)
    double ratio() const { return shape == 0 ? 0 : difference / shape; }
};

/// Quadrature-based modulus of continuity of sigma_inf at lambda; |delta| <= 1.
ContinuityReport continuity_modulus_check(double lambda, double delta, double tol = 1e-8);

struct AdjudicationRow {
    double lambda;
    double J_quad, K_quad, sigma_quad;
    ClosedForm J_closed, K_closed, sigma_closed;
};

/// Compares every closed form against quadrature at the given tolerance.
std::vector<AdjudicationRow> adjudicate_closed_forms(const std::vector<double>& lambdas, double tol = 1e-4);

} // namespace detcount::density

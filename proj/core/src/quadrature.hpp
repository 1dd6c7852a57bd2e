#pragma once

// Globally adaptive Gauss-Kronrod over [a, b], seeded with the known kinks of
// the integrand. The panel with the largest error estimate is bisected until
// the summed estimate meets an absolute tolerance or the panel budget runs out.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace detcount::detail {

struct QuadResult {
    double value = 0;
    double error = 0;
    bool converged = true;
};

template <typename F>
QuadResult integrate_split(F&& f, double a, double b, std::vector<double> breaks, double abs_tol,
                           std::size_t max_panels = 4000) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    // Evaluated on the reference interval so the error estimate scales with the value.
    auto eval = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double err = 0;
        const double v = GK::integrate([&](double x) { return f(mid + half * x); }, -1.0, 1.0, 0, 0.0, &err);
        return Panel{lo, hi, half * v, half * err};
    };

    QuadResult out;
    if (!(b > a)) return out;
    breaks.push_back(a);
    breaks.push_back(b);
    std::erase_if(breaks, [&](double x) { return !(x >= a && x <= b) || !std::isfinite(x); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::priority_queue<Panel> heap;
    double total_err = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        const Panel p = eval(breaks[i], breaks[i + 1]);
        total_err += p.error;
        heap.push(p);
    }
    std::size_t panels = heap.size();
    while (total_err > abs_tol && !heap.empty()) {
        if (panels >= max_panels) {
            out.converged = false;
            break;
        }
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            out.converged = false;
            break;
        }
        heap.pop();
        const Panel left = eval(worst.lo, mid);
        const Panel right = eval(mid, worst.hi);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    for (; !heap.empty(); heap.pop()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
    }
    return out;
}

} // namespace detcount::detail

#include "twophase/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace twophase {

namespace bq = boost::math::quadrature;

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt)
{
    QuadResult r;
    if (a == b) return r;
    double err = 0.0, l1 = 0.0;
    double tol = opt.rel_tol;
    if (opt.abs_tol > 0.0) {
        double e0 = 0.0, l0 = 0.0;
        bq::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e0, &l0);
        if (l0 > 0.0) tol = std::max(tol, opt.abs_tol / l0);
    }
    r.value = bq::gauss_kronrod<double, 31>::integrate(f, a, b, opt.max_depth, tol, &err, &l1);
    r.error = err;
    r.converged = std::isfinite(r.value) && err <= std::max(opt.abs_tol, 10.0 * tol * l1);
    return r;
}

QuadResult integrate_pieces(const std::function<double(double)>& f, std::span<const double> breaks,
                            const QuadOptions& opt)
{
    QuadResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        const auto r = integrate(f, breaks[i], breaks[i + 1], opt);
        total.value += r.value;
        total.error += r.error;
        total.converged = total.converged && r.converged;
    }
    return total;
}

PanelRule gauss_kronrod_panels(double a, double b, int panels)
{
    using gk = bq::gauss_kronrod<double, 61>;
    using g = bq::gauss<double, 30>;
    const auto& ax = gk::abscissa();
    const auto& wk = gk::weights();
    const auto& wg = g::weights();
    // reference rule on [-1, 1]: Gauss nodes sit at odd Kronrod indices
    std::vector<double> rx, rk, rg;
    rx.push_back(0.0);
    rk.push_back(wk[0]);
    rg.push_back(0.0);
    for (std::size_t i = 1; i < ax.size(); ++i) {
        const double gw = (i % 2 == 1) ? wg[i / 2] : 0.0;
        for (double sgn : {-1.0, 1.0}) {
            rx.push_back(sgn * ax[i]);
            rk.push_back(wk[i]);
            rg.push_back(gw);
        }
    }
    PanelRule rule;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            rule.x.push_back(mid + 0.5 * h * rx[i]);
            rule.kronrod.push_back(0.5 * h * rk[i]);
            rule.gauss.push_back(0.5 * h * rg[i]);
        }
    }
    return rule;
}

}  // namespace twophase

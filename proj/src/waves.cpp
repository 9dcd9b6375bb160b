#include "twophase/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twophase {

void WaveEnvelope::validate() const
{
    if (!(a > 0.0) || !(N > 0.0)) throw std::invalid_argument("envelope: a and N must be positive");
    if (kind == WaveKind::huygens && !(c > 0.0)) throw std::invalid_argument("envelope: c must be positive");
}

double envelope_eval(const WaveEnvelope& env, double r, double t)
{
    if (r < 0.0 || t < 0.0) throw std::invalid_argument("envelope_eval: r and t must be >= 0");
    const double d = env.kind == WaveKind::huygens ? r - env.c * t : r;
    return std::pow(1.0 + t, -env.a) * std::pow(1.0 + d * d / (1.0 + t), -env.N);
}

double default_exclusion(const SpatialField& field)
{
    return std::max(4.0 * field.sigma, 2.0 * field.grid.spacing());
}

RatioResult bound_ratio(const SpatialField& field, std::span<const WaveEnvelope> envs, double r_min)
{
    for (const auto& e : envs) e.validate();
    const int n = field.grid.n();
    const double L = field.grid.half_width(), t = field.time;
    RatioResult res;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x = field.grid.coordinate(i), y = field.grid.coordinate(j), z = field.grid.coordinate(k);
                const double r = std::sqrt(x * x + y * y + z * z);
                if (r < r_min || r > L) continue;
                double env = 0.0;
                for (const auto& e : envs) env += envelope_eval(e, r, t);
                const double q = std::abs(field(i, j, k)) / env;
                ++res.points;
                if (q > res.ratio) {
                    res.ratio = q;
                    res.r_at = r;
                }
            }
    return res;
}

Fit linear_fit(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw FitError("fit: need at least two matched points");
    const double m = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    sx /= m;
    sy /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - sx) * (x[i] - sx);
        sxy += (x[i] - sx) * (y[i] - sy);
    }
    if (!(sxx > 0.0)) throw FitError("fit: abscissae are degenerate");
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = sy - f.slope * sx;
    double rr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        rr += e * e;
    }
    f.residual = std::sqrt(rr / m);
    return f;
}

Fit log_log_fit(std::span<const double> t, std::span<const double> y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) throw FitError("fit: values must be positive and finite");
        lx.push_back(std::log1p(t[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly);
}

RadialProfile projected_profile(const SpatialField& f, int axis, double dr, double r_max)
{
    if (axis < 0 || axis > 2) throw std::invalid_argument("projected_profile: axis must be 0..2");
    SpatialField w(f.grid);
    w.time = f.time;
    w.sigma = f.sigma;
    const int n = f.grid.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x[3] = {f.grid.coordinate(i), f.grid.coordinate(j), f.grid.coordinate(k)};
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                w.values[w.index(i, j, k)] = r > 0.0 ? 3.0 * x[axis] / r * f(i, j, k) : 0.0;
            }
    return radial_average(w, dr, r_max);
}

FrontPoint locate_front(const RadialProfile& p, double t, double c_guess, double r_exclude, const FrontOptions& opt)
{
    const double r0 = std::max(r_exclude, opt.search_from * c_guess * t);
    std::size_t ipos = p.r.size(), ineg = p.r.size(), iabs = p.r.size();
    double vpos = 0.0, vneg = 0.0, vabs = 0.0;
    for (std::size_t b = 0; b < p.r.size(); ++b) {
        if (p.r[b] < r0) continue;
        const double w = p.r[b] * p.value[b];
        if (w > vpos) vpos = w, ipos = b;
        if (w < vneg) vneg = w, ineg = b;
        if (std::abs(w) > vabs) vabs = std::abs(w), iabs = b;
    }
    if (iabs == p.r.size()) throw NoFrontError(t, 0.0);
    FrontPoint fp;
    fp.t = t;
    if (opt.estimator == FrontEstimator::peak || ipos == p.r.size() || ineg == p.r.size())
        fp.r_front = p.r[iabs];
    else
        fp.r_front = 0.5 * (p.r[ipos] + p.r[ineg]);

    // between the origin bump and the front the profile must drop below half the front value
    double dip = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < p.r.size(); ++b)
        if (p.r[b] >= r_exclude && p.r[b] <= p.r[iabs]) dip = std::min(dip, std::abs(p.value[b]));
    const double front = std::abs(p.value[iabs]);
    const double separation = dip > 0.0 ? front / dip : std::numeric_limits<double>::infinity();
    if (separation < opt.min_separation) throw NoFrontError(t, separation);

    const double lo = opt.window_lo * c_guess * t, hi = opt.window_hi * c_guess * t + opt.window_pad;
    for (std::size_t b = 0; b < p.r.size(); ++b)
        if (p.r[b] >= std::max(lo, r_exclude) && p.r[b] <= hi) fp.amplitude = std::max(fp.amplitude, std::abs(p.value[b]));
    return fp;
}

FrontSpeed front_speed(std::span<const FrontPoint> points)
{
    if (points.size() < 3) throw FitError("front_speed: need at least three times");
    std::vector<double> t, r;
    for (const auto& p : points) {
        t.push_back(p.t);
        r.push_back(p.r_front);
    }
    const auto f = linear_fit(t, r);
    return {f.slope, f.residual, std::vector<FrontPoint>(points.begin(), points.end())};
}

double amplitude_exponent(std::span<const FrontPoint> points)
{
    if (points.size() < 4) throw FitError("amplitude_exponent: need at least four times");
    std::vector<double> t, a;
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
    for (const auto& p : points) {
        t.push_back(p.t);
        a.push_back(p.amplitude);
        tmin = std::min(tmin, p.t);
        tmax = std::max(tmax, p.t);
    }
    if (!(tmax >= 4.0 * tmin)) throw FitError("amplitude_exponent: times must span a factor of 4");
    return log_log_fit(t, a).slope;
}

double lp_norm(std::span<const double> values, double cell_volume, double p)
{
    if (!(p > 1.0)) throw std::invalid_argument("lp_norm: p must exceed 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (double v : values) s += std::pow(std::abs(v), p);
    return std::pow(s * cell_volume, 1.0 / p);
}

double lp_norm(const SpatialField& f, double p) { return lp_norm(f.values, f.grid.cell_volume(), p); }

std::vector<RateRow> rate_table(std::span<const double> ps)
{
    auto diff = [](double p) { return std::isinf(p) ? 1.5 : 1.5 * (1.0 - 1.0 / p); };
    auto huy = [](double p) { return std::isinf(p) ? 2.0 : 2.0 - 5.0 / (2.0 * p); };
    if (std::abs(diff(2.0) - huy(2.0)) > 1e-15) throw std::logic_error("rate table: branches disagree at p = 2");
    std::vector<RateRow> rows;
    for (double p : ps) {
        if (!(p > 1.0)) throw std::invalid_argument("rate_table: p must exceed 1");
        rows.push_back({p, diff(p), huy(p), p <= 2.0 ? huy(p) : diff(p)});
    }
    return rows;
}

}  // namespace twophase

#include "twophase/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "twophase/spectral.hpp"
#include "twophase/waves.hpp"

namespace twophase {

namespace {

using cvec = std::vector<cd>;

constexpr int kRho = idx::rho, kM = idx::m, kN = idx::n, kW = idx::w;

// walks the half spectrum; f(index, a, b, c) with signed integer wavenumbers
template <class F>
void for_modes(const FrequencyGrid& g, F&& f)
{
    const int n = g.n(), nh = n / 2 + 1;
#pragma omp parallel for
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < nh; ++c) f((std::size_t(i) * n + j) * nh + c, g.signed_index(i), g.signed_index(j), c);
}

bool nyquist_mode(int n, int a, int b, int c) { return a == -n / 2 || b == -n / 2 || c == n / 2; }

bool kept(int n, int a, int b, int c)
{
    // 2/3 rule: 3|k| < n on every axis
    return 3 * std::abs(a) < n && 3 * std::abs(b) < n && 3 * c < n;
}

void zero_nyquist(const FrequencyGrid& g, cvec& h)
{
    const int n = g.n();
    for_modes(g, [&](std::size_t q, int a, int b, int c) {
        if (nyquist_mode(n, a, b, c)) h[q] = 0.0;
    });
}

double l2_of(std::span<const double> v, double mean, double dv)
{
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s * dv);
}

}  // namespace

PositivityError::PositivityError(const std::string& which, double x, double y, double z, double value)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "positivity guard: " << which << " = " << value << " at (" << x << ", " << y << ", " << z << ")";
          return os.str();
      }())
{
}

void InitialDataSpec::validate() const
{
    if (!(eps0 >= 0.0)) throw std::invalid_argument("initial data: eps0 must be >= 0");
    if (!(r > 2.1)) throw std::invalid_argument("initial data: r must exceed 21/10");
    if (!(width > 0.0)) throw std::invalid_argument("initial data: width must be positive");
    for (double w : weights)
        if (!(std::abs(w) <= 1.0)) throw std::invalid_argument("initial data: weights must lie in [-1, 1]");
}

std::array<double, kComponents> InitialDataSpec::effective_weights() const
{
    if (!seed) return weights;
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, kComponents> w{};
    for (double& x : w) x = u(rng);
    return w;
}

SimState::SimState(const FrequencyGrid& g) : grid_(g)
{
    for (auto& h : hat) h.assign(g.half_size(), cd{});
    for (auto& v : u) v.assign(g.size(), 0.0);
}

SpatialField SimState::field(int comp, const std::string& tag) const
{
    SpatialField f(grid_);
    f.values = u.at(comp);
    f.time = time;
    f.tag = tag.empty() ? component_name(comp) : tag;
    return f;
}

std::string component_name(int comp)
{
    static const char* names[] = {"rho", "m1", "m2", "m3", "n", "w1", "w2", "w3"};
    if (comp < 0 || comp >= kComponents) throw std::out_of_range("component index");
    return names[comp];
}

SimState state_from_physical(const FrequencyGrid& grid, std::array<std::vector<double>, kComponents> u, double time)
{
    SimState s(grid);
    s.time = time;
    RealFft3 fft(grid.n());
    const double norm = 1.0 / double(grid.size());
    for (int c = 0; c < kComponents; ++c) {
        if (u[c].size() != grid.size()) throw std::invalid_argument("state_from_physical: field size mismatch");
        fft.forward(u[c], s.hat[c]);
        zero_nyquist(grid, s.hat[c]);
        fft.backward(s.hat[c], s.u[c]);
        for (double& v : s.u[c]) v *= norm;
    }
    return s;
}

SimState init_localized(const InitialDataSpec& spec, const FrequencyGrid& grid, const Model& model)
{
    spec.validate();
    const auto w = spec.effective_weights();
    SimState s(grid);
    const int n = grid.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x = grid.coordinate(i), y = grid.coordinate(j), z = grid.coordinate(k);
                const double prof = spec.eps0 * std::pow(1.0 + (x * x + y * y + z * z) / (spec.width * spec.width), -spec.r);
                const std::size_t q = (std::size_t(i) * n + j) * n + k;
                for (int c = 0; c < kComponents; ++c) s.u[c][q] = w[c] * prof;
            }
    if (spec.zero_mean_momentum)
        for (int c : {kM, kM + 1, kM + 2, kW, kW + 1, kW + 2}) {
            double mean = 0.0;
            for (double v : s.u[c]) mean += v;
            mean /= double(grid.size());
            for (double& v : s.u[c]) v -= mean;
        }
    // guard with margin 2: |rho| <= rho_bar / 4, |n| <= n_bar / 4
    const auto& p = model.params();
    for (auto [c, bg, name] : {std::tuple{kRho, p.rho_bar, "rho"}, std::tuple{kN, p.n_bar, "n"}}) {
        const auto it = std::max_element(s.u[c].begin(), s.u[c].end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (std::abs(*it) > 0.25 * bg) {
            const std::size_t q = std::size_t(it - s.u[c].begin());
            throw PositivityError(name, grid.coordinate(int(q / (std::size_t(n) * n))), grid.coordinate(int(q / n % n)),
                                  grid.coordinate(int(q % n)), *it);
        }
    }
    return state_from_physical(grid, std::move(s.u));
}

struct Solver::Impl {
    RealFft3 fft;
    std::optional<AxialCache> cache;

    Impl(int n) : fft(n) {}
};

Solver::Solver(const Model& model, const FrequencyGrid& grid, double dt, const SolverOptions& opt)
    : model_(model), grid_(grid), dt_(dt), opt_(opt), impl_(std::make_unique<Impl>(grid.n()))
{
    if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    impl_->cache.emplace(model.derived(), grid, dt);
}

Solver::~Solver() = default;

void Solver::sync_physical(SimState& s)
{
    const double norm = 1.0 / double(grid_.size());
    for (int c = 0; c < kComponents; ++c) {
        impl_->fft.backward(s.hat[c], s.u[c]);
        for (double& v : s.u[c]) v *= norm;
    }
}

namespace {

// spectral F1, F2 (unnormalized, like the state) plus the spectral non-divergence term
struct SpectralTerms {
    std::array<cvec, 3> f1, f2, last;
};

}  // namespace

static SpectralTerms spectral_nonlinear(const Model& model, const FrequencyGrid& g, const SimState& s, RealFft3& fft)
{
    const int n = g.n();
    const std::size_t nr = g.size(), nc = g.half_size();
    const double norm = 1.0 / double(nr);
    const auto& p = model.params();
    const auto& dp = model.derived();
    const double dk = std::numbers::pi / g.half_width();

    // dealiased physical fields
    std::array<std::vector<double>, kComponents> t;
    cvec buf(nc);
    for (int c = 0; c < kComponents; ++c) {
        buf = s.hat[c];
        for_modes(g, [&](std::size_t q, int a, int b, int cc) {
            if (!kept(n, a, b, cc)) buf[q] = 0.0;
        });
        t[c].resize(nr);
        fft.backward(buf, t[c]);
        for (double& v : t[c]) v *= norm;
    }
    for (std::size_t q = 0; q < nr; ++q) {
        const double R = t[kRho][q] + p.rho_bar, N = t[kN][q] + p.n_bar;
        if (!(R > 0.5 * p.rho_bar) || !(N > 0.5 * p.n_bar)) {
            const bool bad_rho = !(R > 0.5 * p.rho_bar);
            throw PositivityError(bad_rho ? "rho + rho_bar" : "n + n_bar", g.coordinate(int(q / (std::size_t(n) * n))),
                                  g.coordinate(int(q / n % n)), g.coordinate(int(q % n)), bad_rho ? R : N);
        }
    }

    SpectralTerms out;
    for (int j = 0; j < 3; ++j) {
        out.f1[j].assign(nc, cd{});
        out.f2[j].assign(nc, cd{});
        out.last[j].assign(nc, cd{});
    }
    std::vector<double> prod(nr);
    cvec ph(nc);
    // pointwise product -> truncated spectrum in ph
    auto transform = [&](auto&& pointwise) {
#pragma omp parallel for
        for (std::size_t q = 0; q < nr; ++q) prod[q] = pointwise(q);
        fft.forward(prod, ph);
        for_modes(g, [&](std::size_t q, int a, int b, int c) {
            if (!kept(n, a, b, c)) ph[q] = 0.0;
        });
    };
    const cd I(0.0, 1.0);
    auto kvec = [&](int a, int b, int c) { return std::array<double, 3>{dk * a, dk * b, dk * c}; };

    // -div of symmetric tensors m m / (rho + rho_bar) and w w / (n + n_bar)
    for (int which = 0; which < 2; ++which) {
        const int base = which == 0 ? kM : kW;
        const int dens = which == 0 ? kRho : kN;
        const double bg = which == 0 ? p.rho_bar : p.n_bar;
        auto& target = which == 0 ? out.f1 : out.f2;
        for (int j = 0; j < 3; ++j)
            for (int k = j; k < 3; ++k) {
                transform([&](std::size_t q) { return t[base + j][q] * t[base + k][q] / (t[dens][q] + bg); });
                for_modes(g, [&](std::size_t q, int a, int b, int c) {
                    const auto kv = kvec(a, b, c);
                    target[j][q] -= I * kv[k] * ph[q];
                    if (k != j) target[k][q] -= I * kv[j] * ph[q];
                });
            }
    }

    // viscous remainder on z = n w / (n + n_bar)
    std::array<cvec, 3> z;
    for (int j = 0; j < 3; ++j) {
        transform([&](std::size_t q) { return t[kN][q] * t[kW + j][q] / (t[kN][q] + p.n_bar); });
        z[j] = ph;
    }
    const double mb = dp.mu_bar, ml = dp.mu_bar + dp.lambda_bar;
    for_modes(g, [&](std::size_t q, int a, int b, int c) {
        const auto kv = kvec(a, b, c);
        const double k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
        const cd kz = kv[0] * z[0][q] + kv[1] * z[1][q] + kv[2] * z[2][q];
        for (int j = 0; j < 3; ++j) out.f2[j][q] += mb * k2 * z[j][q] + ml * kv[j] * kz;
    });

    // pressure remainder
    const double a1 = dp.alpha1;
    transform([&](std::size_t q) {
        const double nn = t[kN][q];
        return model.pressure(nn + p.n_bar) - model.pressure(p.n_bar) - a1 * nn;
    });
    for_modes(g, [&](std::size_t q, int a, int b, int c) {
        const auto kv = kvec(a, b, c);
        for (int j = 0; j < 3; ++j) out.f2[j][q] -= I * kv[j] * ph[q];
    });

    // drag correction, the same array with opposite signs
    const double a2 = dp.alpha2;
    for (int j = 0; j < 3; ++j) {
        transform([&](std::size_t q) {
            return ((t[kRho][q] + p.rho_bar) / (t[kN][q] + p.n_bar) - a2) * t[kW + j][q];
        });
        out.last[j] = ph;
        for (std::size_t q = 0; q < nc; ++q) {
            out.f1[j][q] += ph[q];
            out.f2[j][q] -= ph[q];
        }
    }
    for (int j = 0; j < 3; ++j) {
        zero_nyquist(g, out.f1[j]);
        zero_nyquist(g, out.f2[j]);
        zero_nyquist(g, out.last[j]);
    }
    return out;
}

NonlinearTerms Solver::nonlinear_rhs(const SimState& s)
{
    auto sp = spectral_nonlinear(model_, grid_, s, impl_->fft);
    const double norm = 1.0 / double(grid_.size());
    NonlinearTerms nt;
    auto back = [&](const cvec& h, std::vector<double>& v) {
        v.resize(grid_.size());
        impl_->fft.backward(h, v);
        for (double& x : v) x *= norm;
    };
    for (int j = 0; j < 3; ++j) {
        back(sp.f1[j], nt.f1[j]);
        back(sp.f2[j], nt.f2[j]);
        back(sp.last[j], nt.f1_last[j]);
        nt.f2_last[j] = nt.f1_last[j];
        for (double& x : nt.f2_last[j]) x = -x;
    }
    return nt;
}

void Solver::step(SimState& s)
{
    if (opt_.nonlinear) {
        const auto sp = spectral_nonlinear(model_, grid_, s, impl_->fft);
        for (int j = 0; j < 3; ++j)
            for (std::size_t q = 0; q < grid_.half_size(); ++q) {
                s.hat[kM + j][q] += dt_ * sp.f1[j][q];
                s.hat[kW + j][q] += dt_ * sp.f2[j][q];
            }
    }
    const int n = grid_.n();
    const AxialCache& cache = *impl_->cache;
    std::atomic<bool> finite = true;
    for_modes(grid_, [&](std::size_t q, int a, int b, int c) {
        if (nyquist_mode(n, a, b, c)) {
            for (auto& h : s.hat) h[q] = 0.0;
            return;
        }
        const int k2 = a * a + b * b + c * c;
        const AxialPropagator& ap = cache.at(k2);
        Vec3 d(1.0, 0.0, 0.0);
        if (k2 > 0) d = Vec3(a, b, c) / std::sqrt(double(k2));
        Eigen::Matrix<cd, 3, 1> m, w;
        for (int j = 0; j < 3; ++j) {
            m[j] = s.hat[kM + j][q];
            w[j] = s.hat[kW + j][q];
        }
        const cd mL = d[0] * m[0] + d[1] * m[1] + d[2] * m[2];
        const cd wL = d[0] * w[0] + d[1] * w[1] + d[2] * w[2];
        const Eigen::Matrix<cd, 3, 1> mT = m - mL * d, wT = w - wL * d;
        Eigen::Matrix<cd, 4, 1> lv(s.hat[kRho][q], mL, s.hat[kN][q], wL);
        lv = ap.longitudinal * lv;
        const auto& T = ap.transverse;
        s.hat[kRho][q] = lv[0];
        s.hat[kN][q] = lv[2];
        for (int j = 0; j < 3; ++j) {
            s.hat[kM + j][q] = lv[1] * d[j] + T(0, 0) * mT[j] + T(0, 1) * wT[j];
            s.hat[kW + j][q] = lv[3] * d[j] + T(1, 0) * mT[j] + T(1, 1) * wT[j];
        }
        for (const auto& h : s.hat)
            if (!std::isfinite(h[q].real()) || !std::isfinite(h[q].imag())) finite = false;
    });
    s.time += dt_;
    if (!finite) throw std::runtime_error("non-finite spectral coefficient at t = " + std::to_string(s.time));
}

Diagnostics Solver::diagnostics(const SimState& s) const
{
    Diagnostics d;
    d.t = s.time;
    const double dv = grid_.cell_volume();
    const double nr = double(grid_.size());
    d.mass_rho = s.hat[kRho][0].real() * dv;
    d.mass_n = s.hat[kN][0].real() * dv;
    for (int j = 0; j < 3; ++j) d.momentum[j] = (s.hat[kM + j][0].real() + s.hat[kW + j][0].real()) * dv;

    auto scalar = [&](int slot, int c) {
        const double mean = s.hat[c][0].real() / nr;
        double mx = 0.0, mf = 0.0;
        for (double v : s.u[c]) {
            mx = std::max(mx, std::abs(v));
            mf = std::max(mf, std::abs(v - mean));
        }
        d.l2[slot] = l2_of(s.u[c], 0.0, dv);
        d.l2_fluct[slot] = l2_of(s.u[c], mean, dv);
        d.linf[slot] = mx;
        d.linf_fluct[slot] = mf;
    };
    auto vector = [&](int slot, int c0) {
        double mean[3];
        for (int j = 0; j < 3; ++j) mean[j] = s.hat[c0 + j][0].real() / nr;
        double s2 = 0.0, f2 = 0.0, mx = 0.0, mf = 0.0;
        for (std::size_t q = 0; q < grid_.size(); ++q) {
            double a = 0.0, b = 0.0;
            for (int j = 0; j < 3; ++j) {
                const double v = s.u[c0 + j][q];
                a += v * v;
                b += (v - mean[j]) * (v - mean[j]);
            }
            s2 += a;
            f2 += b;
            mx = std::max(mx, a);
            mf = std::max(mf, b);
        }
        d.l2[slot] = std::sqrt(s2 * dv);
        d.l2_fluct[slot] = std::sqrt(f2 * dv);
        d.linf[slot] = std::sqrt(mx);
        d.linf_fluct[slot] = std::sqrt(mf);
    };
    scalar(0, kRho);
    vector(1, kM);
    scalar(2, kN);
    vector(3, kW);
    return d;
}

NonlinearTerms nonlinear_rhs(const Model& model, const SimState& s)
{
    Solver solver(model, s.grid(), 1.0);
    return solver.nonlinear_rhs(s);
}

SimState step(const Model& model, const SimState& s, double dt, const SolverOptions& opt)
{
    Solver solver(model, s.grid(), dt, opt);
    SimState out = s;
    solver.step(out);
    solver.sync_physical(out);
    return out;
}

SimState linear_reference(const DerivedParams& dp, const SimState& s0, double t)
{
    const FrequencyGrid& g = s0.grid();
    const int n = g.n();
    const double dk = std::numbers::pi / g.half_width();
    SimState s = s0;
    s.time = s0.time + t;
    for_modes(g, [&](std::size_t q, int a, int b, int c) {
        if (nyquist_mode(n, a, b, c)) {
            for (auto& h : s.hat) h[q] = 0.0;
            return;
        }
        const CMat8 e = propagator_full(dp, FrequencyPoint(Vec3(dk * a, dk * b, dk * c)), t);
        Eigen::Matrix<cd, 8, 1> v;
        for (int k = 0; k < kComponents; ++k) v[k] = s0.hat[k][q];
        v = e * v;
        for (int k = 0; k < kComponents; ++k) s.hat[k][q] = v[k];
    });
    RealFft3 fft(n);
    const double norm = 1.0 / double(g.size());
    for (int c = 0; c < kComponents; ++c) {
        fft.backward(s.hat[c], s.u[c]);
        for (double& v : s.u[c]) v *= norm;
    }
    return s;
}

double relative_l2_difference(const SimState& a, const SimState& b)
{
    // Parseval: compare coefficients, counting the mirrored half of the spectrum twice
    const int n = a.grid().n(), nh = n / 2 + 1;
    double num = 0.0, den = 0.0;
    for (int c = 0; c < kComponents; ++c)
        for (std::size_t q = 0; q < a.grid().half_size(); ++q) {
            const int cc = int(q % nh);
            const double w = (cc == 0 || cc == n / 2) ? 1.0 : 2.0;
            num += w * std::norm(a.hat[c][q] - b.hat[c][q]);
            den += w * std::norm(b.hat[c][q]);
        }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

RunResult run_from(const Model& model, SimState s, double t_end, double dt, std::span<const double> snapshots,
                   const RunOptions& opt)
{
    if (!(t_end >= s.time)) throw std::invalid_argument("run: t_end precedes the initial time");
    const FrequencyGrid g = s.grid();
    Solver solver(model, g, dt, opt.solver);
    const double t0 = s.time;
    const long nsteps = std::lround((t_end - t0) / dt);
    if (std::abs(nsteps * dt - (t_end - t0)) > 1e-9 * std::max(1.0, t_end)) throw std::invalid_argument("run: t_end is not on the dt lattice");
    std::vector<long> marks;
    for (double ts : snapshots) {
        const long k = std::lround((ts - t0) / dt);
        if (k < 0 || k > nsteps || std::abs(k * dt - (ts - t0)) > 1e-9 * std::max(1.0, ts))
            throw std::invalid_argument("run: snapshot " + std::to_string(ts) + " is not on the dt lattice inside the run");
        marks.push_back(k);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    RunResult res{{}, std::nullopt, !g.wrap_safe(model.derived().c, t_end, opt.wrap_pad), s};
    auto snap = [&] {
        solver.sync_physical(s);
        res.series.push_back(solver.diagnostics(s));
        if (opt.on_snapshot) opt.on_snapshot(s);
    };
    std::size_t next = 0;
    for (long k = 0;; ++k) {
        if (next < marks.size() && marks[next] == k) {
            snap();
            ++next;
        }
        if (k == nsteps) break;
        try {
            solver.step(s);
        } catch (const std::exception& e) {
            res.abort = RunAbort{s.time, e.what()};
            break;
        }
        s.time = t0 + (k + 1) * dt;
    }
    solver.sync_physical(s);
    res.final_state = std::move(s);
    return res;
}

RunResult run(const Model& model, const InitialDataSpec& spec, const FrequencyGrid& grid, double t_end, double dt,
              std::span<const double> snapshots, const RunOptions& opt)
{
    return run_from(model, init_localized(spec, grid, model), t_end, dt, snapshots, opt);
}

double decay_slope(std::span<const double> t, std::span<const double> norm, double t0, double t1)
{
    if (t.size() != norm.size()) throw std::invalid_argument("decay_slope: size mismatch");
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0 && t[i] <= t1) {
            ts.push_back(t[i]);
            vs.push_back(norm[i]);
        }
    if (ts.size() < 4) throw FitError("decay_slope: need at least four points in the window");
    return log_log_fit(ts, vs).slope;
}

}  // namespace twophase

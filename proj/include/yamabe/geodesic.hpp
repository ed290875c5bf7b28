#ifndef YAMABE_GEODESIC_HPP
#define YAMABE_GEODESIC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/sampling.hpp"
#include "yamabe/scalar_field.hpp"
#include "yamabe/signature.hpp"

namespace yamabe {

// Geodesics of g = delta / phi^2 in arbitrary signature. The equation of
// motion needs only phi and its gradient:
//   x' = v,
//   v_l' = (1/phi) [ 2 (d phi/dt) v_l - eps_l phi_l sum_i eps_i v_i^2 ],
// with d phi/dt = sum_i phi_i v_i. Completeness is probed, never proved:
// verdicts carry the reached horizon, except when the bounded-conformal-
// factor sufficient condition applies (Riemannian signature only).

struct GeodesicState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> v;
};

enum class Termination { ReachedTmax, BlowUp, StepCollapse, LeftDomain };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedTmax: return "reached_tmax";
        case Termination::BlowUp: return "blow_up";
        case Termination::StepCollapse: return "step_collapse";
        case Termination::LeftDomain: return "left_domain";
    }
    return "unknown";
}

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> v;
    std::vector<double> speed;  // g(gamma', gamma') per sample
    Termination termination = Termination::ReachedTmax;

    int samples() const { return static_cast<int>(t.size()); }
    const std::vector<double>& final_x() const { return x.back(); }
    const std::vector<double>& final_v() const { return v.back(); }
};

inline void geodesic_rhs(const ScalarField& phi, const Signature& sig,
                         std::span<const double> x, std::span<const double> v,
                         std::span<double> dx, std::span<double> dv) {
    const int n = sig.dim();
    auto [p, grad] = phi.eval_gradient(x);
    if (!(p > 0.0))
        throw FieldDomainError("geodesic_rhs: phi <= 0 along trajectory");
    double dphi_dt = 0.0, kinetic = 0.0;
    for (int i = 0; i < n; ++i) {
        dphi_dt += grad[static_cast<size_t>(i)] * v[i];
        kinetic += sig.eps(i) * v[i] * v[i];
    }
    for (int l = 0; l < n; ++l) {
        dx[l] = v[l];
        dv[l] = (2.0 * dphi_dt * v[l] - sig.eps(l) * grad[static_cast<size_t>(l)] * kinetic) / p;
    }
}

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double blow_up_threshold = 1e8;
    double step_floor_factor = 1e-14;
    int min_samples = 1000;
    long max_steps = 10'000'000;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
struct Dopri5 {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b (5th order) minus the embedded 4th-order weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
};

} // namespace detail

// Adaptive embedded Runge-Kutta 4(5) integration of the geodesic flow up
// to t_end (forward or backward). Terminates early on blow-up, step
// collapse, or when the conformal factor leaves its domain; the
// termination reason is recorded, never hidden. At least min_samples
// accepted steps span the interval.
inline Trajectory integrate(const ScalarField& phi, const Signature& sig,
                            const GeodesicState& init, double t_end,
                            IntegratorOptions opt = {}) {
    const int n = sig.dim();
    if (static_cast<int>(init.x.size()) != n || static_cast<int>(init.v.size()) != n)
        throw InputError("integrate: initial state dimension mismatch");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0) || opt.rel_tol >= 1.0)
        throw InputError("integrate: invalid tolerances");
    if (t_end == init.t)
        throw InputError("integrate: t_end equals the initial time");

    const double span = t_end - init.t;
    const double dir = span > 0 ? 1.0 : -1.0;
    const double h_max = std::abs(span) / std::max(1, opt.min_samples);
    const double t_scale = std::max({1.0, std::abs(init.t), std::abs(t_end)});

    const size_t m = static_cast<size_t>(2 * n);
    std::vector<double> y(m), k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), yerr(m);
    for (int i = 0; i < n; ++i) {
        y[static_cast<size_t>(i)] = init.x[static_cast<size_t>(i)];
        y[static_cast<size_t>(n + i)] = init.v[static_cast<size_t>(i)];
    }

    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds) {
        std::span<const double> xs(s.data(), static_cast<size_t>(n));
        std::span<const double> vs(s.data() + n, static_cast<size_t>(n));
        std::span<double> dxs(ds.data(), static_cast<size_t>(n));
        std::span<double> dvs(ds.data() + n, static_cast<size_t>(n));
        geodesic_rhs(phi, sig, xs, vs, dxs, dvs);
    };

    Trajectory traj;
    auto record = [&](double t, const std::vector<double>& s) {
        traj.t.push_back(t);
        traj.x.emplace_back(s.begin(), s.begin() + n);
        traj.v.emplace_back(s.begin() + n, s.end());
        double kin = 0.0;
        for (int i = 0; i < n; ++i)
            kin += sig.eps(i) * s[static_cast<size_t>(n + i)] * s[static_cast<size_t>(n + i)];
        double p = phi.value(std::span<const double>(s.data(), static_cast<size_t>(n)));
        traj.speed.push_back(kin / (p * p));
    };

    double t = init.t;
    record(t, y);

    using D = detail::Dopri5;
    double h = dir * std::min(h_max, 1e-2 * std::abs(span));
    bool have_k1 = false;

    try {
        rhs(y, k1);
        have_k1 = true;
        for (long step = 0; step < opt.max_steps; ++step) {
            // Stretch slightly onto the horizon so the final step cannot
            // leave a sub-floor remainder from rounding.
            bool last = false;
            if ((t + 1.01 * h - t_end) * dir > 0.0) {
                h = t_end - t;
                last = true;
            }
            if (std::abs(h) < opt.step_floor_factor * t_scale) {
                traj.termination = Termination::StepCollapse;
                return traj;
            }

            for (size_t i = 0; i < m; ++i) ytmp[i] = y[i] + h * D::a21 * k1[i];
            rhs(ytmp, k2);
            for (size_t i = 0; i < m; ++i) ytmp[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
            rhs(ytmp, k3);
            for (size_t i = 0; i < m; ++i)
                ytmp[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
            rhs(ytmp, k4);
            for (size_t i = 0; i < m; ++i)
                ytmp[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
            rhs(ytmp, k5);
            for (size_t i = 0; i < m; ++i)
                ytmp[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i]
                                      + D::a64 * k4[i] + D::a65 * k5[i]);
            rhs(ytmp, k6);
            for (size_t i = 0; i < m; ++i)
                ytmp[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i]
                                      + D::b5 * k5[i] + D::b6 * k6[i]);
            rhs(ytmp, k7);

            double err = 0.0;
            for (size_t i = 0; i < m; ++i) {
                yerr[i] = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i]
                               + D::e5 * k5[i] + D::e6 * k6[i] + D::e7 * k7[i]);
                double scale = opt.abs_tol
                             + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ytmp[i]));
                double q = yerr[i] / scale;
                err += q * q;
            }
            err = std::sqrt(err / static_cast<double>(m));

            if (err <= 1.0) {
                t = last ? t_end : t + h;
                y = ytmp;
                k1 = k7;  // first-same-as-last
                record(t, y);

                double amp = 0.0;
                for (double c : y) amp = std::max(amp, std::abs(c));
                if (amp > opt.blow_up_threshold) {
                    traj.termination = Termination::BlowUp;
                    return traj;
                }
                if (last) {
                    traj.termination = Termination::ReachedTmax;
                    return traj;
                }
            }

            double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            factor = std::clamp(factor, 0.2, 5.0);
            h *= factor;
            if (std::abs(h) > h_max) h = dir * h_max;
        }
    } catch (const FieldDomainError&) {
        traj.termination = Termination::LeftDomain;
        return traj;
    }
    if (!have_k1) throw InputError("integrate: could not evaluate the initial state");
    traj.termination = Termination::StepCollapse;
    return traj;
}

// Drift of the conserved quantities of the light-like translation metric
// family (catalog entry EX21, phi = 1/(1 + xi^(2 theta)), xi = x1 + x2):
//   J_l(t) = x_l'(t) (1 + xi^(2 theta))^2  for l >= 3,
//   K(t)   = xi'(t)  (1 + xi^(2 theta))^2.
struct InvariantDrift {
    std::vector<double> J0;  // initial values, one per coordinate l >= 3
    double K0 = 0.0;
    double max_rel_drift_J = 0.0;
    double max_rel_drift_K = 0.0;
};

inline InvariantDrift ex21_invariant_drift(const Trajectory& traj, int theta) {
    if (traj.samples() < 2) throw InputError("ex21_invariant_drift: empty trajectory");
    const int n = static_cast<int>(traj.x.front().size());
    if (n < 2) throw InputError("ex21_invariant_drift: need n >= 2");
    auto weight = [theta](const std::vector<double>& x) {
        double xi = x[0] + x[1];
        double w = 1.0 + std::pow(xi * xi, theta);
        return w * w;
    };
    auto K_of = [&](int s) {
        return (traj.v[static_cast<size_t>(s)][0] + traj.v[static_cast<size_t>(s)][1])
               * weight(traj.x[static_cast<size_t>(s)]);
    };

    InvariantDrift rep;
    rep.K0 = K_of(0);
    for (int l = 2; l < n; ++l)
        rep.J0.push_back(traj.v[0][static_cast<size_t>(l)] * weight(traj.x[0]));

    const double floor = 1e-12;
    for (int s = 1; s < traj.samples(); ++s) {
        double w = weight(traj.x[static_cast<size_t>(s)]);
        for (int l = 2; l < n; ++l) {
            double J = traj.v[static_cast<size_t>(s)][static_cast<size_t>(l)] * w;
            double ref = std::max(std::abs(rep.J0[static_cast<size_t>(l - 2)]), floor);
            rep.max_rel_drift_J = std::max(rep.max_rel_drift_J,
                                           std::abs(J - rep.J0[static_cast<size_t>(l - 2)]) / ref);
        }
        double K = K_of(s);
        rep.max_rel_drift_K = std::max(rep.max_rel_drift_K,
                                       std::abs(K - rep.K0) / std::max(std::abs(rep.K0), floor));
    }
    return rep;
}

// Completeness evidence for a batch of initial conditions, plus the
// bounded-conformal-factor sufficient check. The sup of |phi| is estimated
// over the sample box and two enlargements; a growing sup means the bound
// cannot be certified from samples.
struct CompletenessReport {
    struct PerInit {
        GeodesicState init;
        Termination forward = Termination::ReachedTmax;
        Termination backward = Termination::ReachedTmax;
        double t_forward = 0.0;
        double t_backward = 0.0;
        bool complete_up_to_tmax = false;
    };

    std::vector<PerInit> results;
    double t_max = 0.0;
    std::string aggregate;  // certified_complete | complete_up_to_tmax | inconclusive_incomplete_candidate

    bool riemannian = false;
    double phi_inf_estimate = 0.0;
    double phi_sup_estimate = 0.0;   // the L of the sufficient condition
    double sup_growth_ratio = 0.0;   // sup over 4x box / sup over 1x box
    bool bounded_conformal_factor = false;
};

inline CompletenessReport completeness_probe(const ScalarField& phi, const Signature& sig,
                                             const std::vector<GeodesicState>& inits,
                                             double t_max, const Box& probe_box,
                                             IntegratorOptions opt = {}, unsigned seed = 0) {
    if (!(t_max > 0.0)) throw InputError("completeness_probe: need t_max > 0");
    CompletenessReport rep;
    rep.t_max = t_max;
    rep.riemannian = sig.is_riemannian();

    // Each trajectory is independent; run the batch data-parallel with
    // per-index result slots so the report order stays deterministic.
    rep.results.resize(inits.size());
    parallel_for(static_cast<int>(inits.size()), [&](int i) {
        const GeodesicState& init = inits[static_cast<size_t>(i)];
        CompletenessReport::PerInit r;
        r.init = init;
        Trajectory fwd = integrate(phi, sig, init, init.t + t_max, opt);
        Trajectory bwd = integrate(phi, sig, init, init.t - t_max, opt);
        r.forward = fwd.termination;
        r.backward = bwd.termination;
        r.t_forward = fwd.t.back();
        r.t_backward = bwd.t.back();
        r.complete_up_to_tmax = fwd.termination == Termination::ReachedTmax
                             && bwd.termination == Termination::ReachedTmax;
        rep.results[static_cast<size_t>(i)] = std::move(r);
    });
    bool all_reached = true;
    for (const auto& r : rep.results)
        all_reached = all_reached && r.complete_up_to_tmax;

    // Bounded-phi estimate over nested boxes.
    double sup1 = 0.0, sup4 = 0.0;
    double low = std::numeric_limits<double>::infinity();
    bool positive_everywhere = true;
    for (double factor : {1.0, 2.0, 4.0}) {
        Box b = probe_box.scaled(factor);
        double sup = 0.0;
        for (const auto& p : sample_box(b, 256, seed)) {
            double val;
            try {
                val = phi.value(p);
            } catch (const FieldDomainError&) {
                positive_everywhere = false;
                continue;
            }
            if (!(val > 0.0)) positive_everywhere = false;
            sup = std::max(sup, std::abs(val));
            low = std::min(low, std::abs(val));
        }
        if (factor == 1.0) sup1 = sup;
        if (factor == 4.0) sup4 = sup;
    }
    rep.phi_inf_estimate = std::isfinite(low) ? low : 0.0;
    rep.phi_sup_estimate = sup4;
    rep.sup_growth_ratio = sup1 > 0.0 ? sup4 / sup1 : std::numeric_limits<double>::infinity();
    rep.bounded_conformal_factor = rep.riemannian && positive_everywhere
                                && rep.phi_inf_estimate > 0.0
                                && rep.sup_growth_ratio <= 1.5;

    if (rep.bounded_conformal_factor && all_reached)
        rep.aggregate = "certified_complete";
    else if (all_reached)
        rep.aggregate = "complete_up_to_tmax";
    else
        rep.aggregate = "inconclusive_incomplete_candidate";
    return rep;
}

// Trajectory CSV: t, x1..xn, v1..vn, speed, and (for the EX21 metric
// family, when theta is supplied) the conserved columns J3..Jn, K.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 const Signature& sig, int theta = 0) {
    const int n = sig.dim();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",v" << i;
    os << ",speed";
    if (theta > 0) {
        for (int l = 3; l <= n; ++l) os << ",J" << l;
        os << ",K";
    }
    os << '\n';
    os.precision(17);
    for (int s = 0; s < traj.samples(); ++s) {
        os << traj.t[static_cast<size_t>(s)];
        for (int i = 0; i < n; ++i) os << ',' << traj.x[static_cast<size_t>(s)][static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i) os << ',' << traj.v[static_cast<size_t>(s)][static_cast<size_t>(i)];
        os << ',' << traj.speed[static_cast<size_t>(s)];
        if (theta > 0) {
            double xi = traj.x[static_cast<size_t>(s)][0] + traj.x[static_cast<size_t>(s)][1];
            double w = 1.0 + std::pow(xi * xi, theta);
            w *= w;
            for (int l = 2; l < n; ++l)
                os << ',' << traj.v[static_cast<size_t>(s)][static_cast<size_t>(l)] * w;
            os << ',' << (traj.v[static_cast<size_t>(s)][0] + traj.v[static_cast<size_t>(s)][1]) * w;
        }
        os << '\n';
    }
}

} // namespace yamabe

#endif

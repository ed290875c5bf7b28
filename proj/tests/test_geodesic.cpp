#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/families.hpp"
#include "yamabe/geodesic.hpp"
#include "test_helpers.hpp"

using namespace yamabe;

namespace {

// The light-like translation metric of catalog entry EX21.
ScalarField ex21_phi(int n, int theta) {
    CatalogBuild b = build_catalog_entry("EX21", n, 1, {{"theta", double(theta)}});
    return b.spec.phi;
}

GeodesicState state(std::vector<double> x, std::vector<double> v) {
    GeodesicState s;
    s.x = std::move(x);
    s.v = std::move(v);
    return s;
}

} // namespace

TEST_CASE("flat metric: straight lines to high accuracy") {
    const int n = 3;
    Signature sig = Signature::euclidean(n);
    ScalarField one = ScalarField::constant(n, 1.0, true);
    GeodesicState init = state({0.1, -0.2, 0.3}, {1.0, 0.0, 0.5});
    Trajectory traj = integrate(one, sig, init, 100.0);
    CHECK(traj.termination == Termination::ReachedTmax);
    CHECK(traj.samples() >= 1000);
    for (int i = 0; i < n; ++i) {
        double expect = init.x[static_cast<size_t>(i)] + 100.0 * init.v[static_cast<size_t>(i)];
        CHECK(std::abs(traj.final_x()[static_cast<size_t>(i)] - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
        CHECK(traj.final_v()[static_cast<size_t>(i)] == doctest::Approx(init.v[static_cast<size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("integrator rejects invalid tolerances") {
    Signature sig = Signature::euclidean(2);
    ScalarField one = ScalarField::constant(2, 1.0, true);
    GeodesicState init = state({0.0, 0.0}, {1.0, 0.0});
    IntegratorOptions bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(integrate(one, sig, init, 1.0, bad), InputError);
    IntegratorOptions bad2;
    bad2.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate(one, sig, init, 1.0, bad2), InputError);
}

TEST_CASE("null velocity with light-like-aligned field keeps v parallel") {
    // In Lorentz signature with v null, the kinetic term drops and
    // v' = 2 (dphi/dt) v / phi.
    const int n = 4, theta = 1;
    Signature sig = Signature::lorentzian(n);
    ScalarField phi = ex21_phi(n, theta);
    std::vector<double> x{0.3, 0.1, -0.2, 0.5};
    std::vector<double> v{0.7, 0.7, 0.0, 0.0};  // null: -v1^2 + v2^2 = 0
    std::vector<double> dx(4), dv(4);
    geodesic_rhs(phi, sig, x, v, dx, dv);
    auto [p, grad] = phi.eval_gradient(x);
    double dphi_dt = 0.0;
    for (int i = 0; i < n; ++i) dphi_dt += grad[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    for (int i = 0; i < n; ++i) {
        CHECK(dx[static_cast<size_t>(i)] == v[static_cast<size_t>(i)]);
        CHECK(dv[static_cast<size_t>(i)] ==
              doctest::Approx(2.0 * dphi_dt * v[static_cast<size_t>(i)] / p).epsilon(1e-13));
    }
}

TEST_CASE("EX21 right-hand side matches the reduced conserved-quantity system") {
    // On the invariant manifold the acceleration must follow the reduced
    // first-order system written through c_l = v_l w^2 and k1 = xi' w^2
    // with w = 1 + xi^(2 theta).
    const int n = 5;
    for (int theta : {1, 2}) {
        Signature sig = Signature::lorentzian(n);
        ScalarField phi = ex21_phi(n, theta);
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> u(-0.9, 0.9);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(n), v(n), dx(n), dv(n);
            for (auto& c : x) c = u(rng);
            for (auto& c : v) c = u(rng);
            geodesic_rhs(phi, sig, x, v, dx, dv);

            double xi = x[0] + x[1];
            double w = 1.0 + std::pow(xi * xi, theta);
            double k1 = (v[0] + v[1]) * w * w;
            double csum = 0.0;
            for (int l = 2; l < n; ++l) csum += (v[l] * w * w) * (v[l] * w * w);
            double pre = 2.0 * theta * std::pow(xi, 2 * theta - 1) / std::pow(w, 5);

            CHECK(testutil::agree(dv[0], -pre * (k1 * k1 + csum), 1e-11));
            CHECK(testutil::agree(dv[1], pre * (-k1 * k1 + csum), 1e-11));
            for (int l = 2; l < n; ++l) {
                double expect = -4.0 * theta * std::pow(xi, 2 * theta - 1) / w
                              * (k1 / (w * w)) * v[l];
                CHECK(testutil::agree(dv[l], expect, 1e-11));
            }
        }
    }
}

TEST_CASE("geodesic speed is conserved along catalog metrics") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);

    // EX21 (Lorentzian) and EX26 (Riemannian), moderate horizon.
    {
        const int n = 4;
        Signature sig = Signature::lorentzian(n);
        ScalarField phi = ex21_phi(n, 1);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> x(n), v(n);
            for (auto& c : x) c = u(rng);
            for (auto& c : v) c = u(rng);
            v[0] += 1.2;  // keep the energy clearly nonzero
            Trajectory traj = integrate(phi, sig, state(x, v), 100.0);
            REQUIRE(traj.termination == Termination::ReachedTmax);
            double e0 = traj.speed.front();
            REQUIRE(std::abs(e0) > 0.05);
            for (double e : traj.speed)
                CHECK(std::abs(e - e0) <= 1e-7 * std::abs(e0));
        }
    }
    {
        // Coordinates grow exponentially in affine time along this metric
        // (it shrinks at infinity), so keep initial speeds small to stay
        // inside the blow-up guard over the full horizon.
        const int n = 3;
        CatalogBuild b = build_catalog_entry("EX26", n, 1);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> x(n), v(n);
            for (auto& c : x) c = u(rng);
            for (auto& c : v) c = 0.15 * u(rng);
            Trajectory traj = integrate(b.spec.phi, b.spec.sig, state(x, v), 100.0);
            REQUIRE(traj.termination == Termination::ReachedTmax);
            double e0 = traj.speed.front();
            for (double e : traj.speed)
                CHECK(std::abs(e - e0) <= 1e-7 * std::max(std::abs(e0), 1e-3));
        }
    }
    {
        // Semi-space (EX22) and punctured (EX25) metrics: conserved up to
        // whichever horizon the domain allows.
        CatalogBuild e22 = build_catalog_entry("EX22", 3, 1);
        Trajectory t22 = integrate(e22.spec.phi, e22.spec.sig,
                                   state({1.5, 0.0, 0.0}, {0.4, 0.3, -0.2}), 10.0);
        double e0 = t22.speed.front();
        for (double e : t22.speed)
            CHECK(std::abs(e - e0) <= 1e-7 * std::max(std::abs(e0), 1e-3));

        CatalogBuild e25 = build_catalog_entry("EX25", 3, 2);
        Trajectory t25 = integrate(e25.spec.phi, e25.spec.sig,
                                   state({0.8, 0.0, 0.6}, {0.0, 1.0, 0.0}), 50.0);
        REQUIRE(t25.termination == Termination::ReachedTmax);
        double f0 = t25.speed.front();
        for (double e : t25.speed)
            CHECK(std::abs(e - f0) <= 1e-7 * std::abs(f0));
    }
}

TEST_CASE("time reversal returns to the initial state") {
    const int n = 4;
    Signature sig = Signature::lorentzian(n);
    ScalarField phi = ex21_phi(n, 2);
    GeodesicState init = state({0.2, -0.1, 0.4, 0.0}, {0.9, 0.2, -0.3, 0.1});
    const double T = 50.0;
    Trajectory fwd = integrate(phi, sig, init, T);
    REQUIRE(fwd.termination == Termination::ReachedTmax);

    GeodesicState back;
    back.t = 0.0;
    back.x = fwd.final_x();
    back.v = fwd.final_v();
    for (auto& c : back.v) c = -c;
    Trajectory rev = integrate(phi, sig, back, T);
    REQUIRE(rev.termination == Termination::ReachedTmax);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(rev.final_x()[static_cast<size_t>(i)] - init.x[static_cast<size_t>(i)]) <= 1e-6);
        CHECK(std::abs(rev.final_v()[static_cast<size_t>(i)] + init.v[static_cast<size_t>(i)]) <= 1e-6);
    }
}

TEST_CASE("invariant drift is exactly zero in the constant-xi flat sector") {
    // Straight line with v1 + v2 = 0: xi is constant, so the weights are
    // constant and J, K reduce to multiples of the constant velocity.
    const int n = 4;
    Signature sig = Signature::lorentzian(n);
    ScalarField one = ScalarField::constant(n, 1.0, true);
    Trajectory traj = integrate(one, sig, state({0.3, 0.1, 0.0, 0.2}, {0.5, -0.5, 0.7, 0.2}), 10.0);
    InvariantDrift rep = ex21_invariant_drift(traj, 1);
    // xi is the sum of two separately accumulated coordinates, so the
    // drift sits at roundoff rather than exactly zero.
    CHECK(rep.max_rel_drift_J <= 1e-12);
    CHECK(rep.max_rel_drift_K <= 1e-12);
}

TEST_CASE("EX21 conserved quantities drift within tolerance") {
    const int n = 4;
    Signature sig = Signature::lorentzian(n);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int theta : {1, 2, 3}) {
        ScalarField phi = ex21_phi(n, theta);
        for (int trial = 0; trial < 7; ++trial) {
            std::vector<double> x(n), v(n);
            for (auto& c : x) c = u(rng);
            for (auto& c : v) c = u(rng);
            Trajectory traj = integrate(phi, sig, state(x, v), 100.0);
            REQUIRE(traj.termination == Termination::ReachedTmax);
            InvariantDrift rep = ex21_invariant_drift(traj, theta);
            CHECK(rep.max_rel_drift_J <= 1e-6);
            CHECK(rep.max_rel_drift_K <= 1e-6);
        }
    }
}

TEST_CASE("drift report reproduces definitions at t = 0") {
    const int n = 4, theta = 2;
    Signature sig = Signature::lorentzian(n);
    ScalarField phi = ex21_phi(n, theta);
    GeodesicState init = state({0.4, 0.2, -0.3, 0.6}, {0.5, -0.2, 0.8, 0.3});
    Trajectory traj = integrate(phi, sig, init, 1.0);
    InvariantDrift rep = ex21_invariant_drift(traj, theta);
    double xi = init.x[0] + init.x[1];
    double w2 = std::pow(1.0 + std::pow(xi * xi, theta), 2);
    CHECK(rep.K0 == doctest::Approx((init.v[0] + init.v[1]) * w2).epsilon(1e-14));
    CHECK(rep.J0[0] == doctest::Approx(init.v[2] * w2).epsilon(1e-14));
    CHECK(rep.J0[1] == doctest::Approx(init.v[3] * w2).epsilon(1e-14));
}

TEST_CASE("tolerance convergence against a tight reference") {
    const int n = 3;
    Signature sig = Signature::euclidean(n);
    CatalogBuild b = build_catalog_entry("EX26", n, 1);
    GeodesicState init = state({0.3, -0.2, 0.5}, {0.6, 0.4, -0.2});
    const double T = 20.0;

    IntegratorOptions ref_opt;
    ref_opt.rel_tol = 1e-12;
    ref_opt.abs_tol = 1e-14;
    Trajectory ref = integrate(b.spec.phi, sig, init, T, ref_opt);
    REQUIRE(ref.termination == Termination::ReachedTmax);

    double prev_err = std::numeric_limits<double>::infinity();
    for (double tol : {1e-5, 5e-6, 2.5e-6, 1.25e-6, 6.25e-7}) {
        IntegratorOptions opt;
        opt.rel_tol = tol;
        opt.abs_tol = 1e-14;
        Trajectory t = integrate(b.spec.phi, sig, init, T, opt);
        REQUIRE(t.termination == Termination::ReachedTmax);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err, std::abs(t.final_x()[static_cast<size_t>(i)] - ref.final_x()[static_cast<size_t>(i)]));
        CHECK(err <= 4.0 * prev_err + 1e-12);  // monotone within the noise band
        prev_err = err;
    }
}

TEST_CASE("completeness probe: flat metric certifies via the bounded-phi gate") {
    const int n = 3;
    Signature sig = Signature::euclidean(n);
    ScalarField one = ScalarField::constant(n, 1.0, true);
    std::vector<GeodesicState> inits;
    inits.push_back(state({0.0, 0.0, 0.0}, {1.0, 0.2, 0.0}));
    inits.push_back(state({1.0, -1.0, 0.5}, {-0.3, 0.8, 0.4}));
    CompletenessReport rep = completeness_probe(one, sig, inits, 50.0, Box::cube(n, -2.0, 2.0));
    CHECK(rep.riemannian);
    CHECK(rep.bounded_conformal_factor);
    CHECK(rep.aggregate == "certified_complete");
    for (const auto& r : rep.results) CHECK(r.complete_up_to_tmax);
}

TEST_CASE("completeness probe: Lorentzian metrics never fire the sufficient gate") {
    const int n = 4;
    Signature sig = Signature::lorentzian(n);
    ScalarField phi = ex21_phi(n, 1);
    std::vector<GeodesicState> inits{state({0.1, 0.0, 0.2, 0.0}, {0.8, -0.1, 0.3, 0.2})};
    CompletenessReport rep = completeness_probe(phi, sig, inits, 100.0, Box::cube(n, -2.0, 2.0));
    CHECK(!rep.riemannian);
    CHECK(!rep.bounded_conformal_factor);
    CHECK(rep.aggregate == "complete_up_to_tmax");
}

TEST_CASE("completeness probe: Riemannian analogue of the bounded profile fires the gate") {
    // Same bounded profile 1/(1 + xi^2), flat Euclidean background.
    const int n = 4;
    Signature sig = Signature::euclidean(n);
    Profile1D prof([](double s) {
        double w = 1.0 + s * s;
        return ProfileJet{1.0 / w, -2.0 * s / (w * w), (-2.0 + 6.0 * s * s) / (w * w * w)};
    }, -1e9, 1e9);
    ScalarField phi = ScalarField::translation_profile(prof, {1.0, 1.0, 0.0, 0.0}, true);
    std::vector<GeodesicState> inits{state({0.2, 0.1, -0.3, 0.4}, {0.5, 0.2, 0.6, -0.1})};
    CompletenessReport rep = completeness_probe(phi, sig, inits, 50.0, Box::cube(n, -2.0, 2.0));
    CHECK(rep.riemannian);
    CHECK(rep.bounded_conformal_factor);
    CHECK(rep.phi_sup_estimate <= 1.0 + 1e-12);
    CHECK(rep.aggregate == "certified_complete");
}

TEST_CASE("completeness probe: unbounded linear-phi member stays inconclusive") {
    const int n = 3;
    CatalogBuild b = build_catalog_entry("EX25", n, 2, {{"lambda", 0.5}});
    std::vector<GeodesicState> inits;
    // outward shot: escapes to infinite radius in finite affine time
    inits.push_back(state({0.7, 0.7, 0.7}, {0.6, 0.6, 0.6}));
    // tangential shot
    inits.push_back(state({0.8, 0.0, 0.6}, {0.0, 1.0, 0.0}));
    CompletenessReport rep = completeness_probe(b.spec.phi, b.spec.sig, inits, 50.0,
                                                Box::cube(n, 0.3, 1.8));
    CHECK(rep.riemannian);
    CHECK(!rep.bounded_conformal_factor);       // sup grows with the box
    CHECK(rep.sup_growth_ratio > 1.5);
    CHECK(rep.aggregate == "inconclusive_incomplete_candidate");
    bool saw_early_termination = false;
    for (const auto& r : rep.results)
        saw_early_termination = saw_early_termination || !r.complete_up_to_tmax;
    CHECK(saw_early_termination);
}

TEST_CASE("trajectory CSV carries the invariant columns for EX21 metrics") {
    const int n = 4;
    Signature sig = Signature::lorentzian(n);
    ScalarField phi = ex21_phi(n, 1);
    Trajectory traj = integrate(phi, sig, state({0.1, 0.2, 0.3, 0.4}, {0.5, 0.1, -0.2, 0.3}), 1.0);
    std::ostringstream os;
    write_trajectory_csv(os, traj, sig, 1);
    std::string head = os.str().substr(0, os.str().find('\n'));
    CHECK(head == "t,x1,x2,x3,x4,v1,v2,v3,v4,speed,J3,J4,K");

    std::ostringstream os2;
    write_trajectory_csv(os2, traj, sig);
    std::string head2 = os2.str().substr(0, os2.str().find('\n'));
    CHECK(head2 == "t,x1,x2,x3,x4,v1,v2,v3,v4,speed");
}

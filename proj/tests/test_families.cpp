#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/families.hpp"
#include "test_helpers.hpp"

using namespace yamabe;

TEST_CASE("potential_from_phi: trivial and closed-form members") {
    // c = 0: f is the constant d.
    Profile1D any = Profile1D([](double s) {
        return ProfileJet{1.5 + 0.2 * std::sin(s), 0.2 * std::cos(s), -0.2 * std::sin(s)};
    }, -5.0, 5.0);
    Profile1D f0 = potential_from_phi(any, 0.0, 3.25);
    CHECK(f0(1.7).v == 3.25);
    CHECK(f0(1.7).d1 == 0.0);

    // phi = 1: f = c xi + d (quadrature anchored at the left endpoint).
    Profile1D one([](double) { return ProfileJet{1.0, 0.0, 0.0}; }, -2.0, 2.0);
    Profile1D flin = potential_from_phi(one, 0.7, 0.1);
    for (double s : {-1.0, 0.0, 1.3})
        CHECK(flin(s).v == doctest::Approx(0.7 * (s - (-2.0)) + 0.1).epsilon(1e-12));

    // phi = 1/(1+xi^2): f = c (xi + 2 xi^3/3 + xi^5/5) + d up to the anchor shift.
    Profile1D bump([](double s) {
        double w = 1.0 + s * s;
        return ProfileJet{1.0 / w, -2.0 * s / (w * w), (-2.0 + 6.0 * s * s) / (w * w * w)};
    }, -3.0, 3.0);
    const double c = 1.4, d = -0.3;
    Profile1D f = potential_from_phi(bump, c, d);
    auto closed = [c](double s) { return c * (s + 2.0 * s * s * s / 3.0 + std::pow(s, 5) / 5.0); };
    const double shift = d - closed(-3.0);
    for (double s : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        CHECK(f(s).v == doctest::Approx(closed(s) + shift).epsilon(1e-10));
        ProfileJet p = bump(s);
        CHECK(f(s).d1 == doctest::Approx(c / (p.v * p.v)).epsilon(1e-14));
    }
}

TEST_CASE("potential_from_phi rejects vanishing phi") {
    Profile1D dies([](double s) { return ProfileJet{1.0 - s, -1.0, 0.0}; }, 0.0, 3.0);
    Profile1D f = potential_from_phi(dies, 1.0, 0.0);
    CHECK_THROWS_AS(f(2.5), FieldDomainError);
}

TEST_CASE("p_constant closed values") {
    CHECK(p_constant(4, 1, 6.0) == doctest::Approx(1.0));
    CHECK(p_constant(3, 1, 0.0) == 0.0);
    for (int n : {3, 5, 7})
        CHECK(p_constant(n, 1, 2.0) == doctest::Approx(2.0 / (2.0 * (n - 1))));
    // (5,2): p = c/(2*4*2*b_52) * (1/4)^2 with b_52 = -1.
    CHECK(p_constant(5, 2, -256.0) == doctest::Approx(1.0));
}

TEST_CASE("rotation null-curvature family: case a records the surviving sign") {
    for (double lambda : {0.9, -0.4}) {
        CatalogBuild b = family_rotation_null_curvature(4, 2, lambda, 'a', 1.3, 0.25);
        CHECK(b.variant.as_written == false);  // written sign does not annihilate
        CHECK(b.variant.residual <= 1e-8 * (1.0 + std::abs(lambda)));
        CHECK(b.rotation.has_value());
        // reduced residuals vanish on r in [0.1, 10]
        for (double r = 0.1; r <= 10.0; r *= 1.9) {
            auto rr = rotation_residuals(*b.rotation, 2, lambda, r);
            CHECK(std::abs(rr.potential) <= 1e-12);
            CHECK(std::abs(rr.curvature) <= 1e-10);
        }
    }
    // lambda = 0 degenerates to the trivial soliton; the written form survives.
    CatalogBuild t = family_rotation_null_curvature(3, 1, 0.0, 'a', 2.0, 0.5);
    CHECK(t.variant.as_written);
    CHECK(t.build_residual == 0.0);
}

TEST_CASE("rotation null-curvature family: case b keeps the written sign") {
    for (int k : {2, 3}) {
        CatalogBuild b = family_rotation_null_curvature(4, k, 0.7, 'b', 1.1, 0.0);
        CHECK(b.variant.as_written);
        // sigma_1 and every sigma_s vanish identically for phi = c0 r.
        for (double r = 0.1; r <= 10.0; r *= 1.7) {
            ProfileJet p = b.rotation->phi()(r);
            for (int s = 1; s <= 4; ++s)
                CHECK(std::abs(rotation_sigma_k(p.v, p.d1, p.d2, r, 4, s)) <= 1e-10);
            auto rr = rotation_residuals(*b.rotation, k, 0.7, r);
            CHECK(std::abs(rr.potential) <= 1e-10);
            CHECK(std::abs(rr.curvature) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(family_rotation_null_curvature(4, 2, 1.0, 'a', -1.0, 0.0), InputError);
    CHECK_THROWS_AS(family_rotation_null_curvature(4, 2, 1.0, 'b', 0.0, 0.0), InputError);
    CHECK_THROWS_AS(family_rotation_null_curvature(4, 2, 1.0, 'x', 1.0, 0.0), InputError);
}

TEST_CASE("catalog: unknown ids rejected, k ranges enforced") {
    CHECK_THROWS_AS(catalog_entry("EX99"), InputError);
    CHECK_THROWS_AS(build_catalog_entry("EX26", 4, 2), InputError);     // k must be 1
    CHECK_THROWS_AS(build_catalog_entry("EX25", 4, 1), InputError);     // k must be >= 2
    CHECK_THROWS_AS(build_catalog_entry("EX23", 5, 2), InputError);     // n must be even
    CHECK_THROWS_AS(build_catalog_entry("EX22", 4, 2), InputError);     // n != 2k
    CHECK_NOTHROW(catalog_entry("EX24"));  // alias
    CHECK(catalog_entry("EX24_GAUSSIAN").id == "EX24_GAUSSIAN");
    CHECK(catalog().size() == 6);
}

TEST_CASE("catalog EX21: steady light-like soliton at several theta and k") {
    for (int theta : {1, 2}) {
        for (int k : {1, 3}) {
            CatalogBuild b = build_catalog_entry("EX21", 4, k, {{"theta", double(theta)}, {"c", 1.0}});
            CHECK(b.lambda == 0.0);
            CHECK(b.build_residual <= 1e-8);
            CHECK(b.translation.has_value());
            CHECK(b.translation->lightlike());
            // reduced residuals on a xi-grid
            for (double xi = -3.0; xi <= 3.0; xi += 0.25) {
                auto rr = translation_residuals(*b.translation, k, 0.0, xi);
                CHECK(std::abs(rr.potential) <= 1e-10);
                CHECK(std::abs(rr.curvature) <= 1e-10);
            }
        }
    }
    CHECK_THROWS_AS(build_catalog_entry("EX21", 4, 1, {{"theta", 1.5}}), InputError);
}

TEST_CASE("catalog EX22 and EX23: semi-space members verify") {
    CatalogBuild e22 = build_catalog_entry("EX22", 3, 1);
    CHECK(e22.build_residual <= 1e-8);
    CHECK(e22.translation.has_value());
    CHECK(!e22.translation->lightlike());

    CatalogBuild e22b = build_catalog_entry("EX22", 5, 2, {{"c1", 2.0}});
    CHECK(e22b.build_residual <= 1e-8);

    for (int n : {4, 6}) {
        CatalogBuild e23 = build_catalog_entry("EX23", n, n / 2);
        CHECK(e23.build_residual <= 1e-8);
        // analytic member satisfies both reduced equations on its domain
        for (double xi = 0.1; xi <= 2.0; xi += 0.23) {
            auto rr = translation_residuals(*e23.translation, n / 2, 0.0, xi);
            CHECK(std::abs(rr.potential) <= 1e-9);
            CHECK(std::abs(rr.curvature) <= 1e-9);
        }
    }
}

TEST_CASE("catalog EX24: gaussian normalization ledger") {
    // lambda = 0: written form survives with exactly zero residual.
    CatalogBuild z = build_catalog_entry("EX24", 3, 1, {{"lambda", 0.0}});
    CHECK(z.variant.as_written);
    CHECK(z.build_residual == 0.0);

    // lambda != 0: only the -(n-1) lambda normalization annihilates.
    CatalogBuild g = build_catalog_entry("EX24", 4, 2, {{"lambda", 1.3}});
    CHECK(!g.variant.as_written);
    CHECK(g.variant.chosen.find("-(n-1) lambda") != std::string::npos);
    CHECK(g.build_residual <= 1e-8 * 2.3);
}

TEST_CASE("catalog EX25 and EX26: rotation members verify") {
    CatalogBuild e25 = build_catalog_entry("EX25", 4, 3, {{"lambda", 0.6}, {"c0", 1.2}});
    CHECK(e25.build_residual <= 1e-8 * 1.6);
    CHECK(e25.variant.as_written);

    for (int n = 2; n <= 6; ++n) {
        CatalogBuild e26 = build_catalog_entry("EX26", n, 1);
        CHECK(e26.lambda == 0.5 * (n - 2));  // exact, including 0 at n = 2
        CHECK(e26.build_residual <= 1e-8);
    }
}

TEST_CASE("every catalog entry passes its build sweep at 64 points") {
    struct Probe { const char* id; int n; int k; };
    for (auto [id, n, k] : {Probe{"EX21", 4, 2}, Probe{"EX22", 3, 1}, Probe{"EX23", 4, 2},
                            Probe{"EX24", 4, 1}, Probe{"EX25", 4, 2}, Probe{"EX26", 3, 1}}) {
        CatalogBuild b = build_catalog_entry(id, n, k);
        CHECK(b.build_residual <= 1e-8 * (1.0 + std::abs(b.lambda)));
        double again = max_abs_residual(b.spec, b.verify_box, 64, 0,
                                        b.accept ? b.accept : positivity_filter(b.spec.phi));
        CHECK(again == b.build_residual);  // deterministic sweep
    }
}

TEST_CASE("analytic translation families meet the reduced gate on a 256-point grid") {
    struct Probe { const char* id; int n; int k; };
    for (auto [id, n, k] : {Probe{"EX21", 4, 2}, Probe{"EX22", 3, 1}, Probe{"EX23", 4, 2}}) {
        CatalogBuild b = build_catalog_entry(id, n, k);
        REQUIRE(b.translation.has_value());
        // Interior interval: image of the verify box under xi.
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = b.translation->alpha()[static_cast<size_t>(i)];
            lo += std::min(a * b.verify_box.lo[static_cast<size_t>(i)],
                           a * b.verify_box.hi[static_cast<size_t>(i)]);
            hi += std::max(a * b.verify_box.lo[static_cast<size_t>(i)],
                           a * b.verify_box.hi[static_cast<size_t>(i)]);
        }
        double worst = 0.0;
        for (int i = 0; i < 256; ++i) {
            double xi = lo + (hi - lo) * i / 255.0;
            auto rr = translation_residuals(*b.translation, k, b.lambda, xi);
            worst = std::max({worst, std::abs(rr.potential), std::abs(rr.curvature)});
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("quadrature family members assemble into verified full solitons") {
    // Build the (3,1) implicit member, lift the table profile to a full
    // n-dimensional translation soliton with f from the potential rule,
    // and check the soliton residual at sampled points. The tolerance is
    // the certification scale of tabulated profiles, not the analytic one.
    const int n = 3, k = 1;
    const double c = 4.0;
    ImplicitRelation rel = family_translation_n_ne_2k(n, k, c, 1.0, 0.0).anchored(0.0);
    // Pick the tabulation window in phi terms, clear of the bracket end
    // where the integrand blows up and flat enough for the stencils.
    double xa = xi_of_phi(rel, 0.8), xb = xi_of_phi(rel, 2.0);
    double lo = std::min(xa, xb), hi = std::max(xa, xb);
    ProfileTable tab = build_profile(rel, lo, hi, 257);
    REQUIRE(!tab.certification_failed);

    Profile1D phi = tab.profile();
    Profile1D f = potential_from_phi(phi, c, 0.0);
    Signature sig = Signature::euclidean(n);
    std::vector<double> alpha{1.0, 0.0, 0.0};
    TranslationAnsatz ans(alpha, sig, phi, f);
    SolitonSpec spec(n, k, 0.0, sig, ans.phi_field(), ans.f_field());

    Box box = Box::cube(n, -0.9, 0.9);
    box.lo[0] = lo + 0.05 * (hi - lo);
    box.hi[0] = hi - 0.05 * (hi - lo);
    double res = max_abs_residual(spec, box, 64, 0);
    CHECK(res <= 1e-6);

    // Reduced residuals on a dense grid stay at certification level.
    double worst = 0.0;
    for (double xi = box.lo[0]; xi <= box.hi[0]; xi += (box.hi[0] - box.lo[0]) / 255.0) {
        auto rr = translation_residuals(ans, k, 0.0, xi);
        worst = std::max({worst, std::abs(rr.potential), std::abs(rr.curvature)});
    }
    CHECK(worst <= 1e-6);
}

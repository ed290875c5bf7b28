#ifndef YAMABE_QUADRATURE_HPP
#define YAMABE_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/scalar_field.hpp"

namespace yamabe {

// Numerical realization of implicitly defined profiles: the conformal
// factor is given by  A(phi) = rhs(xi)  with A a monotone antiderivative.
// We evaluate A by adaptive quadrature, invert by bracketed root finding,
// tabulate phi(xi) on a grid and certify the table against the governing
// second-order ODE.

struct AffineMap {
    double slope = 1.0;
    double intercept = 0.0;
    double operator()(double s) const { return slope * s + intercept; }
    double inverse(double y) const { return (y - intercept) / slope; }
};

struct ImplicitRelation {
    std::function<double(double)> integrand;          // d(xi-side)/d(phi), single-signed on the bracket
    double phi0 = 1.0;                                // antiderivative base point, inside the bracket
    AffineMap rhs;                                    // right side as a function of xi
    std::function<double(double, double, double)> ode_residual;  // (phi, phi', phi'')
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;

    void validate() const {
        if (!integrand) throw InputError("ImplicitRelation: missing integrand");
        if (!(bracket_lo < phi0 && phi0 < bracket_hi))
            throw InputError("ImplicitRelation: base point must lie inside the bracket");
        if (rhs.slope == 0.0)
            throw InputError("ImplicitRelation: right side must depend on xi");
    }

    // Re-anchor the relation so that phi(xi0) = phi0.
    ImplicitRelation anchored(double xi0) const {
        ImplicitRelation r = *this;
        r.rhs.intercept = -r.rhs.slope * xi0;
        return r;
    }
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half).
struct GK15 {
    static constexpr std::array<double, 8> nodes = {
        0.991455371120813, 0.949107912342759, 0.864864423359769,
        0.741531185599394, 0.586087235467691, 0.405845151377397,
        0.207784955007898, 0.000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728};
    // Gauss-7 weights for nodes 1, 3, 5, 7 of the list above.
    static constexpr std::array<double, 4> wg = {
        0.129484966168870, 0.279705391489277, 0.381830050505119,
        0.417959183673469};
};

struct Panel {
    double a, b;
    double value;
    double error;
    double resabs;  // integral of |f|, for the roundoff floor
    int depth;
};

template <typename F>
Panel gk15_panel(const F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0, resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double t = GK15::nodes[static_cast<size_t>(i)];
        double fsum, fabs_sum;
        if (i == 7) {
            double fc = f(c);
            fsum = fc;
            fabs_sum = std::abs(fc);
        } else {
            double fl = f(c - h * t), fr = f(c + h * t);
            fsum = fl + fr;
            fabs_sum = std::abs(fl) + std::abs(fr);
        }
        if (!std::isfinite(fsum))
            throw QuadratureError("quadrature: integrand not finite near " + std::to_string(c));
        kron += GK15::wk[static_cast<size_t>(i)] * fsum;
        resabs += GK15::wk[static_cast<size_t>(i)] * fabs_sum;
        if (i % 2 == 1) gauss += GK15::wg[static_cast<size_t>(i / 2)] * fsum;
    }
    return Panel{a, b, kron * h, std::abs(kron - gauss) * std::abs(h),
                 resabs * std::abs(h), depth};
}

} // namespace detail

// Globally adaptive bisection with a Gauss-Kronrod 7-15 rule per panel:
// the worst panel is split until the summed error estimate meets the
// tolerance. Endpoint singularities are resolved by the geometric
// shrinking of the panels at the offending end; a panel that still fails
// after max_depth bisections aborts with a diagnostic.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double abs_tol = 1e-10, int max_depth = 60) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_adaptive(f, b, a, abs_tol, max_depth);

    std::vector<detail::Panel> panels;
    panels.push_back(detail::gk15_panel(f, a, b, 0));
    const size_t max_panels = 20000;

    while (true) {
        double total_err = 0.0, total_abs = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < panels.size(); ++i) {
            total_err += panels[i].error;
            total_abs += panels[i].resabs;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        // Roundoff floor: no point refining below the precision of the
        // accumulated absolute mass.
        if (total_err <= std::max(abs_tol, 100.0 * std::numeric_limits<double>::epsilon() * total_abs))
            break;
        detail::Panel& w = panels[worst];
        if (w.depth >= max_depth || panels.size() >= max_panels)
            throw QuadratureError("quadrature: refinement limit over ["
                                  + std::to_string(w.a) + ", " + std::to_string(w.b)
                                  + "], error estimate " + std::to_string(total_err)
                                  + " (likely non-integrable endpoint)");
        double mid = 0.5 * (w.a + w.b);
        detail::Panel left = detail::gk15_panel(f, w.a, mid, w.depth + 1);
        detail::Panel right = detail::gk15_panel(f, mid, w.b, w.depth + 1);
        panels[worst] = left;
        panels.push_back(right);
    }

    double sum = 0.0;
    for (const auto& p : panels) sum += p.value;
    return sum;
}

inline double antiderivative(const ImplicitRelation& rel, double phi,
                             double abs_tol = 1e-10) {
    rel.validate();
    if (!(phi > rel.bracket_lo && phi < rel.bracket_hi))
        throw OutOfDomainError("antiderivative: phi outside the open validity bracket",
                               rel.bracket_lo, rel.bracket_hi);
    return integrate_adaptive(rel.integrand, rel.phi0, phi, abs_tol);
}

// Guaranteed-convergence bracketed root finding (Brent).
template <typename F>
double brent_root(const F& f, double a, double b, double rel_tol = 1e-12,
                  int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw InputError("brent_root: endpoints do not bracket a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b)
                          + 0.5 * rel_tol * std::max(1.0, std::abs(b));
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r, s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

// The xi interval over which the relation can be inverted, from the
// antiderivative values just inside the bracket ends.
inline std::pair<double, double> admissible_xi_interval(const ImplicitRelation& rel,
                                                        double end_margin = 1e-6) {
    rel.validate();
    const double w = rel.bracket_hi - rel.bracket_lo;
    const double lo = rel.bracket_lo + end_margin * w;
    const double hi = rel.bracket_hi - end_margin * w;
    double a1 = antiderivative(rel, lo);
    double a2 = antiderivative(rel, hi);
    double x1 = rel.rhs.inverse(a1);
    double x2 = rel.rhs.inverse(a2);
    return {std::min(x1, x2), std::max(x1, x2)};
}

// The xi at which the relation takes the value phi.
inline double xi_of_phi(const ImplicitRelation& rel, double phi) {
    return rel.rhs.inverse(antiderivative(rel, phi));
}

// phi(xi): bracketed root of antiderivative(phi) - rhs(xi) = 0.
inline double invert(const ImplicitRelation& rel, double xi, double rel_tol = 1e-12) {
    rel.validate();
    const double target = rel.rhs(xi);
    const double w = rel.bracket_hi - rel.bracket_lo;
    const double lo = rel.bracket_lo + 1e-9 * w;
    const double hi = rel.bracket_hi - 1e-9 * w;
    double alo = antiderivative(rel, lo);
    double ahi = antiderivative(rel, hi);
    if ((target - alo) * (target - ahi) > 0.0) {
        auto adm = admissible_xi_interval(rel);
        std::ostringstream os;
        os << "invert: xi = " << xi << " outside the invertible range; admissible xi in ["
           << adm.first << ", " << adm.second << "]";
        throw OutOfDomainError(os.str(), adm.first, adm.second);
    }
    auto g = [&](double p) { return antiderivative(rel, p) - target; };
    return brent_root(g, lo, hi, rel_tol);
}

// Tabulated profile with derivative estimates from local quintic fits and
// the certified max-abs ODE residual over the grid.
struct ProfileTable {
    std::vector<double> xi, phi, dphi, ddphi;
    double certified_residual = std::numeric_limits<double>::quiet_NaN();
    bool certification_failed = false;

    int size() const { return static_cast<int>(xi.size()); }

    void write_csv(std::ostream& os) const;
    static ProfileTable read_csv(std::istream& is);
    Profile1D profile() const;
};

namespace detail {

// Solve the tiny normal-equations system of a degree-5 least-squares fit
// through 7 samples. Coordinates are pre-scaled to O(1), so plain Gaussian
// elimination with partial pivoting is adequate.
inline std::array<double, 6> quintic_fit(const std::array<double, 7>& t,
                                         const std::array<double, 7>& y) {
    constexpr int deg = 6;  // number of coefficients
    double M[deg][deg] = {};
    double r[deg] = {};
    for (int s = 0; s < 7; ++s) {
        double powers[2 * deg - 1];
        powers[0] = 1.0;
        for (int a = 1; a < 2 * deg - 1; ++a) powers[a] = powers[a - 1] * t[static_cast<size_t>(s)];
        for (int a = 0; a < deg; ++a) {
            r[a] += powers[a] * y[static_cast<size_t>(s)];
            for (int b = 0; b < deg; ++b) M[a][b] += powers[a + b];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < deg; ++col) {
        int piv = col;
        for (int row = col + 1; row < deg; ++row)
            if (std::abs(M[row][col]) > std::abs(M[piv][col])) piv = row;
        if (piv != col) {
            for (int j = 0; j < deg; ++j) std::swap(M[col][j], M[piv][j]);
            std::swap(r[col], r[piv]);
        }
        if (M[col][col] == 0.0)
            throw InputError("quintic_fit: singular normal equations");
        for (int row = col + 1; row < deg; ++row) {
            double fct = M[row][col] / M[col][col];
            for (int j = col; j < deg; ++j) M[row][j] -= fct * M[col][j];
            r[row] -= fct * r[col];
        }
    }
    std::array<double, 6> c{};
    for (int i = deg - 1; i >= 0; --i) {
        double s = r[i];
        for (int j = i + 1; j < deg; ++j) s -= M[i][j] * c[static_cast<size_t>(j)];
        c[static_cast<size_t>(i)] = s / M[i][i];
    }
    return c;
}

// Value/first/second derivative at offset t (in grid-step units) of the
// quintic fitted over a 7-point window.
inline ProfileJet quintic_eval(const std::array<double, 7>& tw,
                               const std::array<double, 7>& yw, double t, double h) {
    auto c = quintic_fit(tw, yw);
    double v = 0.0, d1 = 0.0, d2 = 0.0;
    for (int a = 5; a >= 0; --a) v = v * t + c[static_cast<size_t>(a)];
    for (int a = 5; a >= 1; --a) d1 = d1 * t + a * c[static_cast<size_t>(a)];
    for (int a = 5; a >= 2; --a) d2 = d2 * t + a * (a - 1) * c[static_cast<size_t>(a)];
    return ProfileJet{v, d1 / h, d2 / (h * h)};
}

} // namespace detail

// Tabulate phi on a uniform xi-grid by inversion, estimate derivatives by
// 7-point quintic fits, and certify against the relation's ODE. A table
// whose residual exceeds certify_tol is returned with the failed flag set,
// never silently.
inline ProfileTable build_profile(const ImplicitRelation& rel, double xi_lo, double xi_hi,
                                  int grid_size = 257, double certify_tol = 1e-6) {
    rel.validate();
    if (grid_size < 33)
        throw InputError("build_profile: grid size below minimum 33");
    if (!(xi_lo < xi_hi))
        throw InputError("build_profile: need xi_lo < xi_hi");

    const double h = (xi_hi - xi_lo) / (grid_size - 1);

    // Invert on the requested grid, plus up to three guard points per side
    // (where the relation allows) so every requested point gets a centered
    // stencil; one-sided stencils at a true domain edge lose about two
    // digits in the second derivative.
    // Tabulation drives the root finder to machine precision: the 1/h^2 in
    // the second-derivative stencils amplifies any point-to-point jitter of
    // the inverted values.
    const double tab_tol = 4.0 * std::numeric_limits<double>::epsilon();
    auto try_invert = [&](double x, double& out) {
        try {
            out = invert(rel, x, tab_tol);
            return out > 0.0;
        } catch (const OutOfDomainError&) {
            return false;
        }
    };
    int ext_lo = 0, ext_hi = 0;
    std::vector<double> guard_lo, guard_hi;
    for (int j = 1; j <= 3; ++j) {
        double p;
        if (!try_invert(xi_lo - j * h, p)) break;
        guard_lo.push_back(p);
        ext_lo = j;
    }
    for (int j = 1; j <= 3; ++j) {
        double p;
        if (!try_invert(xi_hi + j * h, p)) break;
        guard_hi.push_back(p);
        ext_hi = j;
    }

    ProfileTable tab;
    tab.xi.resize(static_cast<size_t>(grid_size));
    tab.phi.resize(static_cast<size_t>(grid_size));
    std::vector<double> ext(static_cast<size_t>(grid_size + ext_lo + ext_hi));
    for (int j = 0; j < ext_lo; ++j) ext[static_cast<size_t>(j)] = guard_lo[static_cast<size_t>(ext_lo - 1 - j)];
    for (int j = 0; j < ext_hi; ++j) ext[static_cast<size_t>(grid_size + ext_lo + j)] = guard_hi[static_cast<size_t>(j)];
    for (int i = 0; i < grid_size; ++i) {
        double x = xi_lo + h * i;
        tab.xi[static_cast<size_t>(i)] = x;
        try {
            tab.phi[static_cast<size_t>(i)] = invert(rel, x, tab_tol);
        } catch (const OutOfDomainError& e) {
            std::ostringstream os;
            os << "build_profile: grid point xi = " << x
               << " not invertible; admissible xi sub-range is ["
               << e.admissible_lo << ", " << e.admissible_hi << "]";
            throw OutOfDomainError(os.str(), e.admissible_lo, e.admissible_hi);
        }
        if (!(tab.phi[static_cast<size_t>(i)] > 0.0))
            throw FieldDomainError("build_profile: inverted phi not positive");
        ext[static_cast<size_t>(i + ext_lo)] = tab.phi[static_cast<size_t>(i)];
    }

    const int n_ext = grid_size + ext_lo + ext_hi;
    tab.dphi.resize(static_cast<size_t>(grid_size));
    tab.ddphi.resize(static_cast<size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        int pos = i + ext_lo;
        int start = std::clamp(pos - 3, 0, n_ext - 7);
        std::array<double, 7> tw, yw;
        for (int s = 0; s < 7; ++s) {
            tw[static_cast<size_t>(s)] = static_cast<double>(start + s - pos);
            yw[static_cast<size_t>(s)] = ext[static_cast<size_t>(start + s)];
        }
        ProfileJet j = detail::quintic_eval(tw, yw, 0.0, h);
        tab.dphi[static_cast<size_t>(i)] = j.d1;
        tab.ddphi[static_cast<size_t>(i)] = j.d2;
    }

    double worst = 0.0;
    if (rel.ode_residual) {
        for (int i = 0; i < grid_size; ++i)
            worst = std::max(worst, std::abs(rel.ode_residual(
                tab.phi[static_cast<size_t>(i)], tab.dphi[static_cast<size_t>(i)],
                tab.ddphi[static_cast<size_t>(i)])));
    }
    tab.certified_residual = worst;
    tab.certification_failed = rel.ode_residual && worst > certify_tol;
    return tab;
}

inline void ProfileTable::write_csv(std::ostream& os) const {
    os << "xi,phi,dphi,ddphi,residual\n";
    os.precision(17);
    for (int i = 0; i < size(); ++i)
        os << xi[static_cast<size_t>(i)] << ',' << phi[static_cast<size_t>(i)] << ','
           << dphi[static_cast<size_t>(i)] << ',' << ddphi[static_cast<size_t>(i)] << ','
           << certified_residual << '\n';
}

inline ProfileTable ProfileTable::read_csv(std::istream& is) {
    ProfileTable tab;
    std::string line;
    if (!std::getline(is, line))
        throw InputError("ProfileTable: empty CSV");
    double worst = 0.0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double vals[5];
        char comma;
        for (int c = 0; c < 5; ++c) {
            if (!(ls >> vals[c]))
                throw InputError("ProfileTable: malformed CSV row: " + line);
            if (c < 4 && !(ls >> comma))
                throw InputError("ProfileTable: malformed CSV row: " + line);
        }
        tab.xi.push_back(vals[0]);
        tab.phi.push_back(vals[1]);
        tab.dphi.push_back(vals[2]);
        tab.ddphi.push_back(vals[3]);
        worst = std::max(worst, std::abs(vals[4]));
    }
    if (tab.size() < 7)
        throw InputError("ProfileTable: need at least 7 rows");
    tab.certified_residual = worst;
    return tab;
}

// Interpolating profile over the table: local quintic fit around the
// query point, same stencil as the derivative estimates.
inline Profile1D ProfileTable::profile() const {
    if (size() < 7)
        throw InputError("ProfileTable: need at least 7 rows for interpolation");
    auto data = std::make_shared<ProfileTable>(*this);
    const double lo = data->xi.front();
    const double hi = data->xi.back();
    auto fn = [data](double s) -> ProfileJet {
        const auto& X = data->xi;
        const int N = data->size();
        if (s < X.front() || s > X.back())
            throw OutOfDomainError("ProfileTable: query outside tabulated range",
                                   X.front(), X.back());
        const double h = (X.back() - X.front()) / (N - 1);
        int center = static_cast<int>(std::lround((s - X.front()) / h));
        center = std::clamp(center, 0, N - 1);
        int start = std::clamp(center - 3, 0, N - 7);
        std::array<double, 7> tw, yw;
        for (int q = 0; q < 7; ++q) {
            tw[static_cast<size_t>(q)] = (X[static_cast<size_t>(start + q)] - X[static_cast<size_t>(center)]) / h;
            yw[static_cast<size_t>(q)] = data->phi[static_cast<size_t>(start + q)];
        }
        double t = (s - X[static_cast<size_t>(center)]) / h;
        return detail::quintic_eval(tw, yw, t, h);
    };
    return Profile1D(fn, lo, hi);
}

} // namespace yamabe

#endif

#ifndef YAMABE_SAMPLING_HPP
#define YAMABE_SAMPLING_HPP

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/tensor_core.hpp"

namespace yamabe {

struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    void validate() const {
        if (lo.empty() || lo.size() != hi.size())
            throw InputError("Box: lo/hi size mismatch");
        for (size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw InputError("Box: need lo < hi in every coordinate");
    }

    static Box cube(int n, double lo, double hi) {
        return Box{std::vector<double>(static_cast<size_t>(n), lo),
                   std::vector<double>(static_cast<size_t>(n), hi)};
    }

    Box scaled(double factor) const {
        Box b = *this;
        for (size_t i = 0; i < lo.size(); ++i) {
            double mid = 0.5 * (lo[i] + hi[i]);
            double half = 0.5 * (hi[i] - lo[i]) * factor;
            b.lo[i] = mid - half;
            b.hi[i] = mid + half;
        }
        return b;
    }
};

namespace detail {

inline double radical_inverse(unsigned long long i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

inline unsigned nth_prime(int idx) {
    static const unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                      31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    if (idx < 0 || idx >= static_cast<int>(sizeof(primes) / sizeof(primes[0])))
        throw InputError("sampling: dimension too large for Halton bases");
    return primes[idx];
}

} // namespace detail

// Quasi-random (Halton) points in a box. The seed offsets the sequence
// start, so identical (box, count, seed) always yields identical points.
// Points failing the acceptance predicate are skipped.
inline std::vector<std::vector<double>>
sample_box(const Box& box, int count, unsigned seed = 0,
           const std::function<bool(std::span<const double>)>& accept = {}) {
    box.validate();
    const int n = box.dim();
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<size_t>(count));
    unsigned long long idx = 1 + static_cast<unsigned long long>(seed) * 100003ULL;
    long long attempts = 0;
    const long long max_attempts = 20000LL * count + 20000;
    std::vector<double> p(static_cast<size_t>(n));
    while (static_cast<int>(pts.size()) < count) {
        if (++attempts > max_attempts)
            throw InputError("sample_box: acceptance predicate rejected too many points");
        for (int d = 0; d < n; ++d) {
            double u = detail::radical_inverse(idx, detail::nth_prime(d));
            p[static_cast<size_t>(d)] = box.lo[static_cast<size_t>(d)]
                + u * (box.hi[static_cast<size_t>(d)] - box.lo[static_cast<size_t>(d)]);
        }
        ++idx;
        if (accept && !accept(p)) continue;
        pts.push_back(p);
    }
    return pts;
}

// Default rejection rule for verification sweeps: drop points where the
// conformal factor is below 1e-12 (phi roots are genuine singular sets;
// phi' roots are fine and not filtered).
inline std::function<bool(std::span<const double>)>
positivity_filter(const ScalarField& phi, double floor = 1e-12) {
    return [phi, floor](std::span<const double> x) {
        try {
            return phi.value(x) > floor;
        } catch (const FieldDomainError&) {
            return false;
        }
    };
}

// Max-abs soliton residual over quasi-random points in a box.
inline double max_abs_residual(const SolitonSpec& spec, const Box& box, int count = 64,
                               unsigned seed = 0,
                               const std::function<bool(std::span<const double>)>& accept = {}) {
    auto filter = accept ? accept : positivity_filter(spec.phi);
    auto pts = sample_box(box, count, seed, filter);
    double worst = 0.0;
    for (const auto& p : pts)
        worst = std::max(worst, soliton_residual(spec, p).max_abs());
    return worst;
}

} // namespace yamabe

#endif

#ifndef YAMABE_ERRORS_HPP
#define YAMABE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace yamabe {

// Bad arguments: wrong dimensions, parameters outside a family's stated
// domain, malformed grids.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Evaluation left the mathematical domain: non-positive conformal factor,
// profile evaluated where it vanishes.
class FieldDomainError : public std::domain_error {
public:
    explicit FieldDomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Adaptive quadrature could not reach the requested tolerance
// (non-integrable endpoint, runaway refinement).
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

// A constructed object failed its build-time verification sweep.
class VerificationError : public std::runtime_error {
public:
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested abscissa lies outside the invertible range of an implicit
// relation. Carries the admissible interval for diagnostics.
class OutOfDomainError : public std::domain_error {
public:
    OutOfDomainError(const std::string& msg, double lo, double hi)
        : std::domain_error(msg), admissible_lo(lo), admissible_hi(hi) {}
    double admissible_lo;
    double admissible_hi;
};

} // namespace yamabe

#endif

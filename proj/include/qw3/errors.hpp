#pragma once

#include <stdexcept>
#include <string>

namespace qw3 {

/// Base of every error raised by the library. `code()` is the short
/// machine-readable name used by the CLI's `error:<code>:` prefix.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define QW3_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

QW3_DEFINE_ERROR(NonConvergence);
QW3_DEFINE_ERROR(DegenerateEigenvector);
QW3_DEFINE_ERROR(NotUnitary);
QW3_DEFINE_ERROR(InvalidC2Params);
QW3_DEFINE_ERROR(InconsistentCoin);
QW3_DEFINE_ERROR(DomainError);
QW3_DEFINE_ERROR(TrackingFailure);
QW3_DEFINE_ERROR(BandEdge);
QW3_DEFINE_ERROR(PoleOnContour);
QW3_DEFINE_ERROR(LatticeOverflow);
QW3_DEFINE_ERROR(InsufficientSignal);
QW3_DEFINE_ERROR(MalformedInput);

#undef QW3_DEFINE_ERROR

/// Raised when an assembled closed form disagrees with the defining integral.
class ClosedFormMismatch : public Error {
public:
    ClosedFormMismatch(const std::string& what, double closed_form, double quadrature)
        : Error("ClosedFormMismatch", what), closed_form_(closed_form), quadrature_(quadrature) {}
    double closed_form() const noexcept { return closed_form_; }
    double quadrature() const noexcept { return quadrature_; }

private:
    double closed_form_;
    double quadrature_;
};

} // namespace qw3

#ifndef HURWITZ_ERRORS_HPP
#define HURWITZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hurwitz {

// Error categories map to CLI exit codes: schema -> 2, numerical -> 3, domain -> 4.
enum class ErrorKind { Schema, Numerical, Domain };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), kind_(kind), code_(std::move(code)) {}
    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

#define HURWITZ_DEFINE_ERROR(NAME, KIND)                                   \
    class NAME : public Error {                                            \
    public:                                                                \
        explicit NAME(const std::string& msg)                              \
            : Error(ErrorKind::KIND, #NAME, msg) {}                        \
    }

HURWITZ_DEFINE_ERROR(OddBranchCount, Schema);
HURWITZ_DEFINE_ERROR(DuplicatePoints, Schema);
HURWITZ_DEFINE_ERROR(DegenerateSeparation, Domain);
HURWITZ_DEFINE_ERROR(OnCut, Domain);
HURWITZ_DEFINE_ERROR(ChartOutOfRange, Domain);
HURWITZ_DEFINE_ERROR(QuadratureNotConverged, Numerical);
HURWITZ_DEFINE_ERROR(NotPositiveDefinite, Numerical);
HURWITZ_DEFINE_ERROR(PathBlocked, Numerical);
HURWITZ_DEFINE_ERROR(DerivOrderTooHigh, Schema);
HURWITZ_DEFINE_ERROR(NotUpperHalfPlane, Domain);
HURWITZ_DEFINE_ERROR(SingularCharacteristic, Numerical);
HURWITZ_DEFINE_ERROR(TooCloseToDiagonal, Domain);
HURWITZ_DEFINE_ERROR(ExtrapolationUnstable, Numerical);
HURWITZ_DEFINE_ERROR(WronskianVanishes, Domain);
HURWITZ_DEFINE_ERROR(DomainNotNormalized, Domain);
HURWITZ_DEFINE_ERROR(BranchTrackingLost, Numerical);
HURWITZ_DEFINE_ERROR(GenusMismatch, Schema);
HURWITZ_DEFINE_ERROR(UnsupportedGenus, Schema);
HURWITZ_DEFINE_ERROR(SingularA, Numerical);
HURWITZ_DEFINE_ERROR(NotIntegral, Numerical);
HURWITZ_DEFINE_ERROR(MalgrangeDivisor, Domain);
HURWITZ_DEFINE_ERROR(ZeroResidue, Domain);
HURWITZ_DEFINE_ERROR(BranchOfYSingular, Domain);
HURWITZ_DEFINE_ERROR(SchemaError, Schema);

#undef HURWITZ_DEFINE_ERROR

} // namespace hurwitz

#endif

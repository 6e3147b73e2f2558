#pragma once

#include <stdexcept>
#include <string>

namespace csk {

// Validation errors map to CLI exit code 2, numerical ones to 3.
class Error : public std::runtime_error {
public:
    Error(const std::string& kind, const std::string& what, bool validation)
        : std::runtime_error(kind + ": " + what), kind_(kind), validation_(validation) {}
    const std::string& kind() const noexcept { return kind_; }
    bool is_validation() const noexcept { return validation_; }

private:
    std::string kind_;
    bool validation_;
};

#define CSK_DECLARE_ERROR(Name, Validation)                                   \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what, Validation) {} \
    };

CSK_DECLARE_ERROR(DomainError, true)
CSK_DECLARE_ERROR(DecayMismatch, true)
CSK_DECLARE_ERROR(TailUndeclared, true)
CSK_DECLARE_ERROR(GridTooCoarse, true)
CSK_DECLARE_ERROR(WindowError, true)
CSK_DECLARE_ERROR(SingularityError, true)
CSK_DECLARE_ERROR(PoleError, false)
CSK_DECLARE_ERROR(NonConvergence, false)
CSK_DECLARE_ERROR(ParameterDegeneracy, false)
CSK_DECLARE_ERROR(BracketError, false)
CSK_DECLARE_ERROR(MissedPoleError, false)
CSK_DECLARE_ERROR(DegeneratePole, false)
CSK_DECLARE_ERROR(BeyondFirstUnstableWindow, false)
CSK_DECLARE_ERROR(TruncationError, false)
CSK_DECLARE_ERROR(QuadratureFailure, false)
CSK_DECLARE_ERROR(NewtonDivergence, false)
CSK_DECLARE_ERROR(NonPositiveIterate, false)
CSK_DECLARE_ERROR(NoConvergence, false)
CSK_DECLARE_ERROR(FrequencyPoleCollision, false)

#undef CSK_DECLARE_ERROR

}  // namespace csk

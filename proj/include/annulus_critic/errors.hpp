#pragma once

#include <stdexcept>
#include <string>

namespace annulus_critic {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ANNULUS_CRITIC_ERROR(Name)                 \
    class Name : public Error {                    \
    public:                                        \
        using Error::Error;                        \
    }

ANNULUS_CRITIC_ERROR(UnsupportedVariant);
ANNULUS_CRITIC_ERROR(DegenerateDomain);
ANNULUS_CRITIC_ERROR(OutsideDomain);
ANNULUS_CRITIC_ERROR(MaxPrincipleViolation);
ANNULUS_CRITIC_ERROR(InadmissibleNonlinearity);
ANNULUS_CRITIC_ERROR(LevelOutOfRange);
ANNULUS_CRITIC_ERROR(EmptyRegion);
ANNULUS_CRITIC_ERROR(InvertedPointOutside);
ANNULUS_CRITIC_ERROR(ParseError);
ANNULUS_CRITIC_ERROR(ValidationError);

#undef ANNULUS_CRITIC_ERROR

/// Newton failed to reach the residual bound; carries the last residual.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double last_residual, int steps)
        : Error(what), last_residual_(last_residual), steps_(steps) {}
    double last_residual() const noexcept { return last_residual_; }
    int steps() const noexcept { return steps_; }

private:
    double last_residual_;
    int steps_;
};

}  // namespace annulus_critic

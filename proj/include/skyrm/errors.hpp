#pragma once
#include <stdexcept>
#include <string>

namespace skyrm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SKYRM_ERROR(name)                                  \
    struct name : Error {                                  \
        explicit name(const std::string& msg = #name)      \
            : Error(std::string(#name) + ": " + msg) {}    \
    }

SKYRM_ERROR(NonHermitian);
SKYRM_ERROR(WrongFactorShape);
SKYRM_ERROR(UnknownFactor);
SKYRM_ERROR(LabelCollision);
SKYRM_ERROR(InsufficientPositiveSpectrum);
SKYRM_ERROR(TooManyUndefinedPoints);
SKYRM_ERROR(NonOrthogonalModes);
SKYRM_ERROR(PhaseWithConjugation);
SKYRM_ERROR(NotCoefficientForm);
SKYRM_ERROR(RankExceedsDimension);
SKYRM_ERROR(ShapeMismatch);
SKYRM_ERROR(EdgeBinsTooLarge);
SKYRM_ERROR(NonOrthonormalInput);
SKYRM_ERROR(NotUnitary);
SKYRM_ERROR(DimensionMismatch);

#undef SKYRM_ERROR

} // namespace skyrm

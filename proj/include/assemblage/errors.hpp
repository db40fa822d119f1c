#ifndef ASSEMBLAGE_ERRORS_HPP
#define ASSEMBLAGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace assemblage {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

#define ASSEMBLAGE_DEFINE_ERROR(NAME)                    \
  struct NAME : Error {                                  \
    explicit NAME(const std::string &msg) : Error(msg) {} \
  }

// molgraph
ASSEMBLAGE_DEFINE_ERROR(UnparsableSmiles);
ASSEMBLAGE_DEFINE_ERROR(KekulizationFailure);
ASSEMBLAGE_DEFINE_ERROR(UnsupportedFeature);
ASSEMBLAGE_DEFINE_ERROR(UnknownElement);

// complexity
ASSEMBLAGE_DEFINE_ERROR(EmptyGraph);

// spectra
ASSEMBLAGE_DEFINE_ERROR(MalformedRecord);
ASSEMBLAGE_DEFINE_ERROR(EmptyPeakList);
ASSEMBLAGE_DEFINE_ERROR(AllPeaksOutOfRange);
ASSEMBLAGE_DEFINE_ERROR(NonPositiveMass);

// ml
ASSEMBLAGE_DEFINE_ERROR(LengthMismatch);
ASSEMBLAGE_DEFINE_ERROR(ZeroTarget);
ASSEMBLAGE_DEFINE_ERROR(EmptyDataset);
ASSEMBLAGE_DEFINE_ERROR(DegenerateDesign);
ASSEMBLAGE_DEFINE_ERROR(NonPositiveFeature);
ASSEMBLAGE_DEFINE_ERROR(TooFewRows);
ASSEMBLAGE_DEFINE_ERROR(InvalidHyperparameter);
ASSEMBLAGE_DEFINE_ERROR(DimensionMismatch);
ASSEMBLAGE_DEFINE_ERROR(GridEmpty);

// analysis
ASSEMBLAGE_DEFINE_ERROR(NonPositiveValue);
ASSEMBLAGE_DEFINE_ERROR(TooFewPoints);
ASSEMBLAGE_DEFINE_ERROR(DegenerateSplit);
ASSEMBLAGE_DEFINE_ERROR(InvalidSubstitution);

// cli / io
ASSEMBLAGE_DEFINE_ERROR(ConfigError);
ASSEMBLAGE_DEFINE_ERROR(IoError);

#undef ASSEMBLAGE_DEFINE_ERROR

}  // namespace assemblage

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace avdiar {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define AVDIAR_DEFINE_ERROR(Name)                                       \
  struct Name : Error {                                                 \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// ingest
AVDIAR_DEFINE_ERROR(MalformedTimestamp);
AVDIAR_DEFINE_ERROR(NonMonotonicIndex);
AVDIAR_DEFINE_ERROR(DimensionMismatch);
AVDIAR_DEFINE_ERROR(DuplicateId);
AVDIAR_DEFINE_ERROR(GapOrOverlapBetweenShots);
AVDIAR_DEFINE_ERROR(UnknownUtteranceId);
AVDIAR_DEFINE_ERROR(ParseError);

// shot analysis
AVDIAR_DEFINE_ERROR(ImageTooSmall);
AVDIAR_DEFINE_ERROR(GeometryMismatch);

// dialogue patterns
AVDIAR_DEFINE_ERROR(PairNotInPatternSet);

// features
AVDIAR_DEFINE_ERROR(MissingUtterance);

// clustering
AVDIAR_DEFINE_ERROR(InvalidP);
AVDIAR_DEFINE_ERROR(OrderMismatch);
AVDIAR_DEFINE_ERROR(EmptyCluster);
AVDIAR_DEFINE_ERROR(SizeGuardExceeded);

// fusion
AVDIAR_DEFINE_ERROR(UniverseMismatch);
AVDIAR_DEFINE_ERROR(FusionDegenerate);

// evaluation
AVDIAR_DEFINE_ERROR(MissingReference);
AVDIAR_DEFINE_ERROR(EmptyScoredSet);

#undef AVDIAR_DEFINE_ERROR

}  // namespace avdiar

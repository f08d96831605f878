#pragma once

#include <stdexcept>
#include <string>

namespace genap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// prompt-core
struct MissingMarkerError : Error { using Error::Error; };
struct SplitSegmentError : Error { using Error::Error; };
struct OverLengthError : Error { using Error::Error; };
struct MissingScoreError : Error { using Error::Error; };

// genetic operators
struct NoVerbalizerError : Error { using Error::Error; };
struct EmptyPoolError : Error { using Error::Error; };
struct EmptyTemplateError : Error { using Error::Error; };

// engine
struct UnevaluatedIndividualError : Error { using Error::Error; };
struct PopulationTooSmallError : Error { using Error::Error; };
struct EvaluationFailedError : Error { using Error::Error; };
struct NoUserPromptsError : Error { using Error::Error; };
struct InfeasibleVerbalizerError : Error { using Error::Error; };
struct CorruptCheckpointError : Error { using Error::Error; };
struct VersionMismatchError : Error { using Error::Error; };

// metrics
struct LengthMismatchError : Error { using Error::Error; };
struct EmptyDatasetError : Error { using Error::Error; };
struct EmptyReferenceError : Error { using Error::Error; };
struct OutOfRangeComponentError : Error { using Error::Error; };

// gateway
struct TransportError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct RemoteError : Error { using Error::Error; };

// cli / config
struct ConfigError : Error { using Error::Error; };

}  // namespace genap

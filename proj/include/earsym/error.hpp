#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace earsym {

// Category decides the CLI exit code: input errors map to 2, computation errors to 3.
enum class ErrorCategory { input, computation };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

namespace detail {
template <ErrorCategory C>
struct CategorizedError : Error {
    explicit CategorizedError(std::string message) : Error(C, std::move(message)) {}
};
using InputError = CategorizedError<ErrorCategory::input>;
using ComputationError = CategorizedError<ErrorCategory::computation>;
}  // namespace detail

// Raster / geometry
struct EmptyMask : detail::ComputationError { using CategorizedError::CategorizedError; };
struct DegenerateMask : detail::ComputationError { using CategorizedError::CategorizedError; };
struct EmptyChordList : detail::ComputationError { using CategorizedError::CategorizedError; };
struct NonMatchingDimensions : detail::InputError { using CategorizedError::CategorizedError; };
struct EmptyImage : detail::InputError { using CategorizedError::CategorizedError; };

// Embeddings / scoring
struct ZeroVector : detail::ComputationError { using CategorizedError::CategorizedError; };
struct MissingEmbedding : detail::InputError { using CategorizedError::CategorizedError; };

// Labeling / protocols
struct UnlabelableImage : detail::InputError { using CategorizedError::CategorizedError; };
struct MissingSideLabel : detail::InputError { using CategorizedError::CategorizedError; };
struct TooFewImages : detail::InputError { using CategorizedError::CategorizedError; };

// Metrics
struct EmptyScoreList : detail::InputError { using CategorizedError::CategorizedError; };
struct TooFewScores : detail::InputError { using CategorizedError::CategorizedError; };
struct SubjectNotInGallery : detail::InputError { using CategorizedError::CategorizedError; };
struct EmptyGallery : detail::InputError { using CategorizedError::CategorizedError; };

// Configuration / generators
struct InvalidConfig : detail::InputError { using CategorizedError::CategorizedError; };
struct InvalidRotation : detail::InputError { using CategorizedError::CategorizedError; };

// File I/O
struct IoError : detail::InputError { using CategorizedError::CategorizedError; };
struct ParseError : detail::InputError { using CategorizedError::CategorizedError; };
struct DuplicateId : detail::InputError { using CategorizedError::CategorizedError; };
struct MagicMismatch : detail::InputError { using CategorizedError::CategorizedError; };
struct DimMismatch : detail::InputError { using CategorizedError::CategorizedError; };
struct TruncatedFile : detail::InputError { using CategorizedError::CategorizedError; };

}  // namespace earsym

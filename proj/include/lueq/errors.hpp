#pragma once

#include <stdexcept>
#include <string>

namespace lueq {

// Each error names the violated contract; the message carries the measured
// violation so callers can report it verbatim.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error { using Error::Error; };
struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotOrthonormal : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct TraceNotOne : Error { using Error::Error; };
struct NotPositiveSemidefinite : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct InvalidRank : Error { using Error::Error; };
struct DimsMismatch : Error { using Error::Error; };

}  // namespace lueq

#pragma once

#include <stdexcept>
#include <string>

namespace quatmetric {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |q| below the invertibility floor.
struct ZeroDivisor : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct Singular : Error {
    using Error::Error;
};

struct NotSymplecticBlockForm : Error {
    using Error::Error;
};

// The eigenvalues of the complex image failed to come in conjugate pairs.
// This is a numeric breakdown, not a property of the input.
struct EmbeddingSpectrumAsymmetric : Error {
    using Error::Error;
};

enum class QuasiAntiHermitianFailure { NonDiagonalizable, RealSpectrumPart };

inline const char* to_string(QuasiAntiHermitianFailure reason) {
    switch (reason) {
        case QuasiAntiHermitianFailure::NonDiagonalizable: return "NonDiagonalizable";
        case QuasiAntiHermitianFailure::RealSpectrumPart: return "RealSpectrumPart";
    }
    return "unknown";
}

struct NotQuasiAntiHermitian : Error {
    explicit NotQuasiAntiHermitian(QuasiAntiHermitianFailure why)
        : Error(std::string("operator is not quasianti-Hermitian: ") + to_string(why)), reason(why) {}

    QuasiAntiHermitianFailure reason;
};

struct NotCKForm : Error {
    using Error::Error;
};

struct ConfigInvalid : Error {
    using Error::Error;
};

}  // namespace quatmetric

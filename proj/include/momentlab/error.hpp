#pragma once

#include <stdexcept>
#include <string>

namespace momentlab {

enum class Errc {
    NotInvertible,
    ModuliNotCoprime,
    ModulusMismatch,
    BadFactorization,
    PhaseDerivativeVanishes,
    DomainError,
    NearPole,
    MissingPrime,
    RamanujanViolation,
    ContourTooClose,
    BelowTransition,
    TableTooSmall,
    CutoffUnreached,
    TruncationFailure,
    BudgetExceeded,
    PreconditionViolated,
    UnknownKey,
    TypeError,
    ValidationError,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotInvertible: return "NotInvertible";
        case Errc::ModuliNotCoprime: return "ModuliNotCoprime";
        case Errc::ModulusMismatch: return "ModulusMismatch";
        case Errc::BadFactorization: return "BadFactorization";
        case Errc::PhaseDerivativeVanishes: return "PhaseDerivativeVanishes";
        case Errc::DomainError: return "DomainError";
        case Errc::NearPole: return "NearPole";
        case Errc::MissingPrime: return "MissingPrime";
        case Errc::RamanujanViolation: return "RamanujanViolation";
        case Errc::ContourTooClose: return "ContourTooClose";
        case Errc::BelowTransition: return "BelowTransition";
        case Errc::TableTooSmall: return "TableTooSmall";
        case Errc::CutoffUnreached: return "CutoffUnreached";
        case Errc::TruncationFailure: return "TruncationFailure";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::TypeError: return "TypeError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace momentlab

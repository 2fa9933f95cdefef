#pragma once

#include <stdexcept>
#include <string>

namespace nearsir {

enum class Errc {
    BadConfig,
    ZeroTotalDegree,
    NoSusceptibles,
    Subcritical,
    DegenerateMoments,
    OddTotalDegree,
    NotGraphical,
    AttemptsExhausted,
    SpecMismatch,
    UnsupportedInitialRecovered,
    QuadratureFailure,
    NoLargeOutbreaks,
    TargetUnreachable,
};

//! Domain error with a machine-checkable code. BadConfig means the input
//! document itself is malformed; everything else is a violated precondition.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::BadConfig: return "BadConfig";
        case Errc::ZeroTotalDegree: return "ZeroTotalDegree";
        case Errc::NoSusceptibles: return "NoSusceptibles";
        case Errc::Subcritical: return "Subcritical";
        case Errc::DegenerateMoments: return "DegenerateMoments";
        case Errc::OddTotalDegree: return "OddTotalDegree";
        case Errc::NotGraphical: return "NotGraphical";
        case Errc::AttemptsExhausted: return "AttemptsExhausted";
        case Errc::SpecMismatch: return "SpecMismatch";
        case Errc::UnsupportedInitialRecovered: return "UnsupportedInitialRecovered";
        case Errc::QuadratureFailure: return "QuadratureFailure";
        case Errc::NoLargeOutbreaks: return "NoLargeOutbreaks";
        case Errc::TargetUnreachable: return "TargetUnreachable";
    }
    return "Unknown";
}

} // namespace nearsir

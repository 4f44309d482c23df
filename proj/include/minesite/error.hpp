#pragma once

#include <stdexcept>
#include <string>

namespace minesite {

/// Failure categories. Each maps onto one CLI exit status.
enum class ErrorKind {
    Validation,     // bad input values or config
    Io,             // unreadable / unwritable files
    GeoReference,   // missing or unusable georeferencing
    EmptyExtent,    // polygon does not overlap raster
    Domain,         // argument outside an operation's domain
    Data,           // referenced data missing (e.g. land price)
    CoRegistration, // rasters on different grids
    Invariant       // internal consistency check failed
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::GeoReference: return "geo-reference error";
    case ErrorKind::EmptyExtent: return "empty-extent error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::CoRegistration: return "co-registration error";
    case ErrorKind::Invariant: return "invariant violation";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// CLI exit code: 0 success, 1 validation, 2 I/O, 3 internal invariant.
inline int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Io: return 2;
    case ErrorKind::Invariant: return 3;
    default: return 1;
    }
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace minesite

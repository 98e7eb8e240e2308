#pragma once

#include <stdexcept>
#include <string>

namespace asso {

// Error classes map one-to-one onto the CLI exit codes (see tools/).
enum class ErrorKind {
    invalid_parameter,
    degenerate_window,
    no_peak,
    empty_ridge,
    insufficient_data,
    undefined_entropy,
    domain,
    io,
    config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thin helpers so call sites read `throw InvalidParameter("...")`.
#define ASSO_DECLARE_ERROR(Name, Kind)                                              \
    class Name : public Error {                                                     \
    public:                                                                         \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}    \
    };

ASSO_DECLARE_ERROR(InvalidParameter, invalid_parameter)
ASSO_DECLARE_ERROR(DegenerateWindow, degenerate_window)
ASSO_DECLARE_ERROR(NoPeak, no_peak)
ASSO_DECLARE_ERROR(EmptyRidge, empty_ridge)
ASSO_DECLARE_ERROR(InsufficientData, insufficient_data)
ASSO_DECLARE_ERROR(UndefinedEntropy, undefined_entropy)
ASSO_DECLARE_ERROR(DomainError, domain)
ASSO_DECLARE_ERROR(IoError, io)
ASSO_DECLARE_ERROR(ConfigError, config)

#undef ASSO_DECLARE_ERROR

} // namespace asso

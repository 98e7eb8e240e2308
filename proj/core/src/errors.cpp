#include "asso/errors.hpp"

namespace asso {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::degenerate_window: return "degenerate-window";
    case ErrorKind::no_peak: return "no-peak";
    case ErrorKind::empty_ridge: return "empty-ridge";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::undefined_entropy: return "undefined-entropy";
    case ErrorKind::domain: return "domain";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

} // namespace asso

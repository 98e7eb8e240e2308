#pragma once

#include <string_view>

namespace asso::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the ASSO_LOG environment variable (error|warn|info|debug),
// read once on first use; defaults to warn.
Level level();
void set_level(Level lvl);

void write(Level lvl, std::string_view msg);

inline void error(std::string_view msg) { write(Level::error, msg); }
inline void warn(std::string_view msg) { write(Level::warn, msg); }
inline void info(std::string_view msg) { write(Level::info, msg); }
inline void debug(std::string_view msg) { write(Level::debug, msg); }

} // namespace asso::log

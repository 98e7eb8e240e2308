#include "asso/logging.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace asso::log {
namespace {

Level from_env() {
    const char* env = std::getenv("ASSO_LOG");
    if (env == nullptr) {
        return Level::warn;
    }
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

std::atomic<int>& current() {
    static std::atomic<int> lvl{static_cast<int>(from_env())};
    return lvl;
}

const char* tag(Level lvl) {
    switch (lvl) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
    }
    return "";
}

} // namespace

Level level() { return static_cast<Level>(current().load()); }

void set_level(Level lvl) { current().store(static_cast<int>(lvl)); }

void write(Level lvl, std::string_view msg) {
    if (static_cast<int>(lvl) > current().load()) {
        return;
    }
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::clog << "[asso " << tag(lvl) << "] " << msg << '\n';
}

} // namespace asso::log

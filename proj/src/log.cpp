#include "evonet/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace evonet::log {

Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("EVONET_LOG");
        if (env == nullptr) return Level::Quiet;
        if (std::strcmp(env, "debug") == 0) return Level::Debug;
        if (std::strcmp(env, "info") == 0) return Level::Info;
        return Level::Quiet;
    }();
    return lvl;
}

void info(const std::string& msg) {
    if (level() >= Level::Info) std::fprintf(stderr, "[evonet] %s\n", msg.c_str());
}

void debug(const std::string& msg) {
    if (level() >= Level::Debug) std::fprintf(stderr, "[evonet] %s\n", msg.c_str());
}

}  // namespace evonet::log

#pragma once

#include <string>

namespace evonet::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

// Parsed once from EVONET_LOG ("quiet", "info", "debug"); default quiet.
Level level();

void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace evonet::log

#pragma once

#include <string>

namespace crossflow {

/// Writes "[warn] <message>" to stderr. Serialized across threads.
void warn(const std::string& message);

}  // namespace crossflow

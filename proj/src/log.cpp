#include "crossflow/log.hpp"

#include <iostream>
#include <mutex>

namespace crossflow {

void warn(const std::string& message) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[warn] " << message << "\n";
}

}  // namespace crossflow

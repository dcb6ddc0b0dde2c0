#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace thermovis {

/// Runs body(i) for i in [0, count) on `workers` threads. Index i is always
/// handled by worker i % workers, so results written by index are identical
/// for any worker count. The first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace thermovis

#include "thermovis/core/parallel.hpp"

#include <algorithm>
#include <limits>

namespace thermovis {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
    const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
    if (n_workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::size_t> error_index(n_workers, std::numeric_limits<std::size_t>::max());
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += n_workers) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        error_index[w] = i;
                        return;
                    }
                }
            });
        }
    }
    const auto first = std::min_element(error_index.begin(), error_index.end());
    if (*first != std::numeric_limits<std::size_t>::max()) {
        std::rethrow_exception(errors[static_cast<std::size_t>(first - error_index.begin())]);
    }
}

}  // namespace thermovis

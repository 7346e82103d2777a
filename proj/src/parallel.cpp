#include "lh/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace lh {

namespace {

std::size_t detect_workers() {
    if (const char* env = std::getenv("LH_THREADS")) {
        try {
            long value = std::stol(env);
            if (value > 0) return static_cast<std::size_t>(value);
        } catch (...) {
            // ignore malformed values
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

std::size_t worker_count() {
    // Read once: the environment is fixed for the life of the process.
    static const std::size_t workers = detect_workers();
    return workers;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
    if (count == 0) return;
    std::size_t workers = std::min(worker_count(), (count + min_chunk - 1) / min_chunk);
    if (workers <= 1) {
        body(0, count);
        return;
    }
    std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&body, begin, end] { body(begin, end); });
    }
    body(0, std::min(count, chunk));
    for (auto& t : threads) t.join();
}

}  // namespace lh

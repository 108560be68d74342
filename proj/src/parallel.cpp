#include "wavekin/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace wavekin {

namespace {
std::atomic<unsigned> requested_threads{0};
}

void set_thread_count(unsigned count) noexcept { requested_threads = count; }

unsigned thread_count() noexcept
{
    const unsigned r = requested_threads;
    if (r != 0) return r;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(thread_count(), n / 256 + 1);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            const std::size_t b = std::min(n, w * chunk);
            const std::size_t e = std::min(n, b + chunk);
            pool.emplace_back([&body, &errors, w, b, e] {
                try {
                    body(b, e);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        try {
            body(0, std::min(n, chunk));
        } catch (...) {
            errors[0] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wavekin

#ifndef YAMABE_PARALLEL_HPP
#define YAMABE_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace yamabe {

// Worker cap for data-parallel batches. YAMABE_LAB_THREADS overrides the
// hardware count; 1 disables threading.
inline int max_threads() {
    if (const char* env = std::getenv("YAMABE_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Index-parallel loop over pure work items. Results must be written to
// per-index slots; the first captured exception is rethrown after join.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    int nt = std::min(max_threads(), count);
    if (nt <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(nt));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<size_t>(t)] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace yamabe

#endif

#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ergomax {

// ERGOMAX_THREADS overrides the worker count (default: available parallelism).
inline unsigned thread_count() {
    if (const char* s = std::getenv("ERGOMAX_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// ERGOMAX_QUAD_TOL overrides the quadrature tolerance (default 1e-10).
inline double quad_tol() {
    if (const char* s = std::getenv("ERGOMAX_QUAD_TOL")) {
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end != s && v > 0) return v;
    }
    return 1e-10;
}

// Chunked parallel loop with a fixed chunk size. Chunk boundaries depend only
// on n, never on the thread count, so reductions assembled in chunk order are
// byte-reproducible under any ERGOMAX_THREADS setting. The body must not throw.
template <class F>
void parallel_chunks(std::size_t n, std::size_t chunk, F&& body) {
    if (n == 0) return;
    if (chunk == 0) chunk = 1;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    const std::size_t nt = std::min<std::size_t>(thread_count(), nchunks);
    auto run = [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        body(c, lo, hi);
    };
    if (nt <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= nchunks) return;
                run(c);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace ergomax

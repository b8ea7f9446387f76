#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ergomax/errors.hpp"

namespace ergomax {

// First `count` primes in increasing order, by sieve of Eratosthenes.
inline std::vector<std::uint64_t> nth_primes(std::size_t count) {
    if (count == 0) throw ParameterError("nth_primes: count must be >= 1");
    // p_n < n (ln n + ln ln n) for n >= 6; generous floor for small n.
    double n = static_cast<double>(count);
    std::size_t bound = 16;
    if (count >= 6) {
        bound = static_cast<std::size_t>(n * (std::log(n) + std::log(std::log(n))) + 8);
    }
    for (;;) {
        std::vector<bool> composite(bound + 1, false);
        std::vector<std::uint64_t> primes;
        primes.reserve(count);
        for (std::size_t i = 2; i <= bound && primes.size() < count; ++i) {
            if (composite[i]) continue;
            primes.push_back(i);
            for (std::size_t j = i * i; j <= bound; j += i) composite[j] = true;
        }
        if (primes.size() >= count) return primes;
        bound *= 2;
    }
}

}  // namespace ergomax

#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nue {

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedPair : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// worker count from NUE_LAB_THREADS, default hardware concurrency
unsigned thread_budget();

// Runs fn(i) for i in [0, n) on up to thread_budget() workers. Each index is
// handled exactly once, so writes to slot i stay deterministic.
template <class F>
void parallel_for(size_t n, F&& fn) {
    size_t w = std::min<size_t>(thread_budget(), n);
    if (w <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (size_t t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// natural log of a positive big integer, accurate to double precision
inline double log_mpz(const mpz_class& z) {
    if (sgn(z) <= 0) throw std::domain_error("log of non-positive integer");
    long e = 0;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

inline double log_mpq(const mpq_class& q) {
    return log_mpz(q.get_num()) - log_mpz(q.get_den());
}

constexpr double kLn2 = 0.69314718055994530942;

}  // namespace nue

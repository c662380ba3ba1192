#ifndef AKL_COMMON_HPP
#define AKL_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace akl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Bad arguments, malformed files, shape mismatches. CLI exit code 1.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Factorization breakdown, non-convergent quadrature. CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline int& thread_count_ref() {
    static int n = 1;
    return n;
}
}  // namespace detail

inline void set_thread_count(int n) {
    detail::thread_count_ref() = n < 1 ? 1 : n;
}

inline int thread_count() { return detail::thread_count_ref(); }

/// Chunked parallel loop over [0, count). Falls back to a plain loop for
/// a single thread or small ranges. `fn(i)` must be safe to call
/// concurrently for distinct i.
template <typename Fn>
void parallel_for(Index count, Fn&& fn) {
    const int nthreads = thread_count();
    if (nthreads <= 1 || count < 64) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const Index chunk = (count + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        const Index lo = t * chunk;
        const Index hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (Index i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Deterministic 64-bit RNG (xoshiro-style splitmix init + mt19937_64 core
/// would be fine too, but distribution results from <random> are not
/// portable across standard libraries; we derive uniforms from raw bits).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

private:
    std::uint64_t state_;
};

}  // namespace akl

#endif

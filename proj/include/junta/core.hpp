#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace junta {

// A point of {+1,-1}^n. Bit i set means x_i = -1; coordinate 0 is the least
// significant bit.
using Point = std::uint32_t;

inline constexpr int kMaxArity = 24;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error {
    using Error::Error;
};
struct CapacityError : Error {
    using Error::Error;
};
struct EmptyDistributionError : Error {
    using Error::Error;
};
struct UnsupportedModeError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct InvariantViolation : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};

struct CoordSet {
    std::uint32_t bits = 0;

    constexpr CoordSet() = default;
    constexpr explicit CoordSet(std::uint32_t b) : bits(b) {}

    static CoordSet of(std::initializer_list<int> coords) {
        CoordSet s;
        for (int c : coords) s.bits |= 1u << c;
        return s;
    }
    static CoordSet of(const std::vector<int>& coords) {
        CoordSet s;
        for (int c : coords) s.bits |= 1u << c;
        return s;
    }
    static constexpr CoordSet full(int n) { return CoordSet(n >= 32 ? ~0u : ((1u << n) - 1u)); }

    constexpr int size() const { return std::popcount(bits); }
    constexpr bool empty() const { return bits == 0; }
    constexpr bool contains(int i) const { return (bits >> i) & 1u; }
    constexpr bool subset_of(CoordSet o) const { return (bits & ~o.bits) == 0; }
    constexpr bool intersects(CoordSet o) const { return (bits & o.bits) != 0; }
    constexpr CoordSet complement(int n) const { return CoordSet(full(n).bits & ~bits); }

    std::vector<int> elements() const {
        std::vector<int> out;
        for (std::uint32_t b = bits; b; b &= b - 1) out.push_back(std::countr_zero(b));
        return out;
    }

    std::string str() const {
        std::string s = "{";
        bool first = true;
        for (int c : elements()) {
            if (!first) s += ",";
            s += std::to_string(c + 1);
            first = false;
        }
        return s + "}";
    }

    friend constexpr CoordSet operator|(CoordSet a, CoordSet b) { return CoordSet(a.bits | b.bits); }
    friend constexpr CoordSet operator&(CoordSet a, CoordSet b) { return CoordSet(a.bits & b.bits); }
    friend constexpr CoordSet operator-(CoordSet a, CoordSet b) { return CoordSet(a.bits & ~b.bits); }
    friend constexpr bool operator==(CoordSet a, CoordSet b) = default;
    friend constexpr auto operator<=>(CoordSet a, CoordSet b) { return a.bits <=> b.bits; }
};

// chi_S(x) = prod_{i in S} x_i
inline double chi(std::uint32_t S, Point x) { return (std::popcount(S & x) & 1) ? -1.0 : 1.0; }

inline int coordinate_value(Point x, int i) { return ((x >> i) & 1u) ? -1 : 1; }

// All k-subsets of the set `universe`, in increasing bitmask order.
inline std::vector<CoordSet> subsets_of_size(CoordSet universe, int k) {
    std::vector<CoordSet> out;
    if (k < 0 || k > universe.size()) return out;
    std::uint32_t u = universe.bits;
    for (std::uint32_t s = u;; s = (s - 1) & u) {
        if (std::popcount(s) == k) out.emplace_back(s);
        if (s == 0) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r < 9.0e15 ? std::round(r) : r;
}

inline std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw CapacityError("factorial argument out of range");
    std::uint64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
    return r;
}

// ---------------------------------------------------------------------------
// Random numbers. Streams are split from a root seed with a counter, so a
// computation keyed by (seed, index) does not depend on scheduling order.

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t a = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ull));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

// Derive an independent child generator from a parent.
inline Rng split(Rng& parent) { return make_rng(parent(), parent()); }

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Point uniform_point(int n, Rng& rng) {
    return static_cast<Point>(rng()) & CoordSet::full(n).bits;
}

inline int uniform_int(int lo, int hi, Rng& rng) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Bernoulli noise on the coordinates of V: each one is kept with probability
// rho and otherwise replaced by a uniform bit, i.e. flipped with probability
// (1-rho)/2.
class NoiseSampler {
public:
    NoiseSampler(double rho, CoordSet V) : V_(V) {
        if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("noise rate outside [0,1]");
        const double q = (1.0 - rho) / 2.0;
        threshold_ = q >= 0.5 ? (std::uint64_t{1} << 63) : static_cast<std::uint64_t>(std::ldexp(q, 64));
        trivial_ = V.empty() || rho == 1.0;
    }

    Point operator()(Point x, Rng& rng) const {
        if (trivial_) return x;
        Point y = x;
        for (std::uint32_t b = V_.bits; b; b &= b - 1) {
            if (rng() < threshold_) y ^= b & (~b + 1);
        }
        return y;
    }

private:
    CoordSet V_;
    std::uint64_t threshold_ = 0;
    bool trivial_ = true;
};

inline Point sample_noise_point(Point x, double rho, CoordSet V, Rng& rng) {
    return NoiseSampler(rho, V)(x, rng);
}

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Callers key any randomness on i, so results do not depend on the schedule.
template <class F>
void parallel_for(std::size_t count, F&& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Sum of fn(rng_i, begin, end) over fixed chunks of [0, count); chunk i uses
// make_rng(seed, i). The chunking does not depend on the thread count.
template <class F>
double chunked_sum(std::uint64_t count, std::uint64_t seed, F&& fn) {
    constexpr std::uint64_t kChunks = 64;
    const std::uint64_t chunks = std::min<std::uint64_t>(kChunks, std::max<std::uint64_t>(count, 1));
    std::vector<double> part(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t i) {
        Rng r = make_rng(seed, i);
        part[i] = fn(r, count * i / chunks, count * (i + 1) / chunks);
    });
    double s = 0.0;
    for (double v : part) s += v;
    return s;
}

}  // namespace junta

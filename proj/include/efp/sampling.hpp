// Deterministic sampling: a splitmix64 stream plus fixed-size chunking so
// certification reductions are reproducible regardless of worker count.
#pragma once

#include <cstdint>
#include <future>
#include <thread>
#include <vector>

namespace efp {

// Counter-based PRNG (splitmix64). Portable and stateless enough that a
// (seed, draw-index) pair always yields the same value on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]
    double next_unit_open0() { return 1.0 - next_unit(); }

    // uniform in [lo, hi]
    double next_in(double lo, double hi) { return lo + next_unit() * (hi - lo); }

    // uniform index in [0, n)
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::uint64_t state_;
};

// Substream for worker `chunk` of a run keyed by `master`. Streams for
// distinct chunks are decorrelated by construction.
inline Rng substream(std::uint64_t master, std::uint64_t chunk) {
    Rng mix(master ^ (0xa24baed4963ee407ull * (chunk + 1)));
    return Rng(mix.next_u64());
}

enum class SampleDist { uniform, grid, boundary_biased };

// How a certification or check run draws its samples. `tolerance` is the
// pass threshold on the minimum pointwise margin.
struct SamplingPlan {
    std::int64_t count = 100000;
    SampleDist dist = SampleDist::uniform;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
};

namespace detail {
inline constexpr std::int64_t kChunkSize = 16384;  // fixed: reduction order must not depend on thread count
}

// Map-reduce over plan.count samples. `fn(chunk_index, rng, n)` evaluates one
// chunk with its own substream; `merge` must be associative. Chunks run on a
// small async pool but are merged in chunk order, so the result is a pure
// function of (plan, fn).
template <class R, class ChunkFn, class MergeFn>
R chunked_reduce(const SamplingPlan& plan, R init, ChunkFn fn, MergeFn merge) {
    const std::int64_t chunks =
        (plan.count + detail::kChunkSize - 1) / detail::kChunkSize;
    std::vector<std::future<R>> futs;
    futs.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t ci = 0; ci < chunks; ++ci) {
        const std::int64_t lo = ci * detail::kChunkSize;
        const std::int64_t n = std::min<std::int64_t>(detail::kChunkSize, plan.count - lo);
        futs.push_back(std::async(std::launch::deferred | std::launch::async,
                                  [&, ci, n]() -> R {
                                      Rng rng = substream(plan.seed, static_cast<std::uint64_t>(ci));
                                      return fn(ci, rng, n);
                                  }));
    }
    R acc = init;
    for (auto& f : futs) acc = merge(acc, f.get());
    return acc;
}

}  // namespace efp

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace ivdl {

// Deterministic parallel first-hit search over [0, count): returns exactly
// the payload a sequential ascending scan would return, for any job count.
// Workers claim ascending chunks; a chunk is skipped only once a hit at a
// smaller index is already known, so every index below the winner is visited.
// make_ctx(worker) builds per-worker scratch state; visit(ctx, i) returns a
// payload to report a hit at i.  after_ctx(ctx) runs once per worker under a
// lock (for merging diagnostics).
template <typename Payload, typename MakeCtx, typename Visit, typename AfterCtx>
std::optional<Payload> parallel_first(uint64_t count, int jobs, uint64_t chunk, MakeCtx make_ctx,
                                      Visit visit, AfterCtx after_ctx) {
    if (chunk == 0) chunk = 1;
    if (jobs < 2 || count <= chunk) {
        auto ctx = make_ctx(0);
        std::optional<Payload> out;
        for (uint64_t i = 0; i < count; ++i) {
            out = visit(ctx, i);
            if (out) break;
        }
        after_ctx(ctx);
        return out;
    }

    std::atomic<uint64_t> next{0};
    std::atomic<uint64_t> best{UINT64_MAX};
    std::mutex mu;
    std::optional<Payload> result;
    uint64_t result_idx = UINT64_MAX;
    std::exception_ptr error;

    auto worker = [&](int id) {
        std::optional<decltype(make_ctx(0))> ctx;
        try {
            ctx.emplace(make_ctx(id));
            for (;;) {
                uint64_t start = next.fetch_add(chunk);
                if (start >= count) break;
                if (start > best.load(std::memory_order_acquire)) break;
                uint64_t end = std::min(count, start + chunk);
                for (uint64_t i = start; i < end; ++i) {
                    if (i > best.load(std::memory_order_relaxed)) break;
                    if (auto hit = visit(*ctx, i)) {
                        uint64_t prev = best.load();
                        while (i < prev && !best.compare_exchange_weak(prev, i)) {}
                        std::lock_guard<std::mutex> lock(mu);
                        if (i < result_idx) {
                            result_idx = i;
                            result = std::move(hit);
                        }
                        // this worker's later indices can only be larger
                        after_ctx(*ctx);
                        ctx.reset();
                        return;
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!error) error = std::current_exception();
            best.store(0); // stop the other workers
        }
        if (ctx) {
            std::lock_guard<std::mutex> lock(mu);
            after_ctx(*ctx);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return result;
}

} // namespace ivdl

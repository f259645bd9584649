#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>

namespace surrscope {

/// How a data-parallel loop is executed. Results never depend on the choice:
/// each work item writes only its own output slot and draws from its own
/// derived random stream.
struct ExecPolicy {
    enum class Mode { serial, openmp };

    Mode mode = Mode::openmp;
    /// Upper bound on worker threads; 0 means the OpenMP default.
    int max_threads = 0;

    static ExecPolicy serial() noexcept { return {Mode::serial, 1}; }
    static ExecPolicy openmp(int max_threads = 0) noexcept { return {Mode::openmp, max_threads}; }
};

/// Number of threads a parallel region would use under `policy`.
int effective_threads(const ExecPolicy& policy) noexcept;

/// Runs body(i) for i in [0, n). Under the OpenMP policy iterations are
/// distributed dynamically; the first exception thrown by any iteration is
/// rethrown on the calling thread after the loop drains.
void parallel_for(const ExecPolicy& policy, std::size_t n, const std::function<void(std::size_t)>& body);

/// Thread-safe completion counter handed to long-running analyses.
class ProgressSink {
public:
    using Callback = std::function<void(std::size_t done, std::size_t total)>;

    ProgressSink() = default;
    explicit ProgressSink(Callback cb) : cb_(std::move(cb)) {}

    void start(std::size_t total);
    void advance(std::size_t k = 1);

private:
    Callback cb_;
    std::mutex mu_;
    std::size_t done_ = 0;
    std::size_t total_ = 0;
};

} // namespace surrscope

#include "surrscope/kernels/exec.hpp"

#include <omp.h>

namespace surrscope {

int effective_threads(const ExecPolicy& policy) noexcept
{
    if (policy.mode == ExecPolicy::Mode::serial) {
        return 1;
    }
    const int available = omp_get_max_threads();
    return policy.max_threads > 0 && policy.max_threads < available ? policy.max_threads : available;
}

void parallel_for(const ExecPolicy& policy, std::size_t n, const std::function<void(std::size_t)>& body)
{
    const int threads = effective_threads(policy);
    if (threads <= 1 || n <= 1 || omp_in_parallel()) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < count; ++i) {
        {
            std::lock_guard lock(failure_mu);
            if (failure) {
                continue;
            }
        }
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void ProgressSink::start(std::size_t total)
{
    std::lock_guard lock(mu_);
    total_ = total;
    done_ = 0;
    if (cb_) {
        cb_(done_, total_);
    }
}

void ProgressSink::advance(std::size_t k)
{
    std::lock_guard lock(mu_);
    done_ += k;
    if (cb_) {
        cb_(done_, total_);
    }
}

} // namespace surrscope

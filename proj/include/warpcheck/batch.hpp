#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace warpcheck {

// Execution policy for per-point batch loops. Parallel kernels write into
// preallocated slots indexed by point and reductions run serially afterward,
// so both policies produce bit-identical results.
enum class ExecPolicy { serial, parallel };

namespace detail {

// Holds the exception thrown at the lowest index so that failures are
// reported deterministically regardless of thread scheduling.
class FirstError {
public:
    void capture(std::size_t index) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!err_ || index < index_) {
            err_ = std::current_exception();
            index_ = index;
        }
    }
    void rethrow_if_any() const {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr err_;
    std::size_t index_ = 0;
};

}  // namespace detail

template <class Fn>
void for_each_index(std::size_t n, ExecPolicy policy, Fn&& fn) {
    if (policy == ExecPolicy::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    detail::FirstError err;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            err.capture(static_cast<std::size_t>(i));
        }
    }
    err.rethrow_if_any();
}

}  // namespace warpcheck

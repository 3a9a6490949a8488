#include "qif/executor.hpp"

#include <ctime>

namespace qif {

ThreadPoolExecutor::ThreadPoolExecutor(std::size_t workers) {
    if (workers == 0) workers = 1;
    threads_.reserve(workers);
    for (std::size_t id = 0; id < workers; ++id) threads_.emplace_back([this, id] { loop(id); });
}

ThreadPoolExecutor::~ThreadPoolExecutor() {
    {
        std::lock_guard<std::mutex> lock(mu_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPoolExecutor::run(std::size_t count, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    std::unique_lock<std::mutex> lock(mu_);
    task_ = &task;
    count_ = count;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
    start_cv_.notify_all();
    done_cv_.wait(lock, [this] { return finished_ == threads_.size(); });
    task_ = nullptr;
    if (error_) std::rethrow_exception(error_);
}

void ThreadPoolExecutor::loop(std::size_t id) {
    std::size_t seen = 0;
    for (;;) {
        std::unique_lock<std::mutex> lock(mu_);
        start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        const auto* task = task_;
        const std::size_t count = count_;
        lock.unlock();

        std::exception_ptr err;
        for (std::size_t i = id; i < count; i += threads_.size()) {
            try {
                (*task)(i);
            } catch (...) {
                err = std::current_exception();
            }
        }

        lock.lock();
        if (err && !error_) error_ = err;
        if (++finished_ == threads_.size()) done_cv_.notify_one();
    }
}

double thread_cpu_seconds() noexcept {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

} // namespace qif

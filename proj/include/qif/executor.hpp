#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qif {

/// Runs task(0) .. task(count-1). Tasks must not share mutable state.
class Executor {
public:
    virtual ~Executor() = default;
    virtual void run(std::size_t count, const std::function<void(std::size_t)>& task) = 0;
    [[nodiscard]] virtual std::size_t workers() const noexcept = 0;
};

class SequentialExecutor final : public Executor {
public:
    void run(std::size_t count, const std::function<void(std::size_t)>& task) override {
        for (std::size_t i = 0; i < count; ++i) task(i);
    }
    [[nodiscard]] std::size_t workers() const noexcept override { return 1; }
};

/// Fixed pool of threads. Task i always runs on worker i % workers(), so the
/// assignment of blocks to workers does not depend on scheduling.
class ThreadPoolExecutor final : public Executor {
public:
    explicit ThreadPoolExecutor(std::size_t workers);
    ~ThreadPoolExecutor() override;
    ThreadPoolExecutor(const ThreadPoolExecutor&) = delete;
    ThreadPoolExecutor& operator=(const ThreadPoolExecutor&) = delete;

    void run(std::size_t count, const std::function<void(std::size_t)>& task) override;
    [[nodiscard]] std::size_t workers() const noexcept override { return threads_.size(); }

private:
    void loop(std::size_t id);

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable start_cv_, done_cv_;
    const std::function<void(std::size_t)>* task_ = nullptr;
    std::size_t count_ = 0;
    std::size_t generation_ = 0;
    std::size_t finished_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

/// CPU seconds consumed by the calling thread.
[[nodiscard]] double thread_cpu_seconds() noexcept;

} // namespace qif

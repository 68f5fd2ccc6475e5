#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace slbm {

/// Fixed set of worker threads executing indexed tasks in barriered rounds.
///
/// `for_each(n, fn)` calls fn(t) for t in [0, n) spread over the workers and
/// returns once all calls have finished. The calling thread takes part as
/// worker 0. The first exception thrown by a task is rethrown to the caller.
class WorkerPool {
  public:
    explicit WorkerPool(unsigned workers = 1) : workers_(std::max(1u, workers)) {
        for (unsigned w = 1; w < workers_; ++w)
            threads_.emplace_back([this] { loop(); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        wake_.notify_all();
        for (auto& t : threads_)
            t.join();
    }

    [[nodiscard]] unsigned size() const noexcept { return workers_; }

    template <class Fn>
    void for_each(std::size_t tasks, Fn&& fn) {
        if (tasks == 0)
            return;
        if (workers_ == 1 || tasks == 1) {
            for (std::size_t t = 0; t < tasks; ++t)
                fn(t);
            return;
        }
        std::function<void(std::size_t)> job = std::forward<Fn>(fn);
        {
            std::lock_guard lock(mutex_);
            job_ = &job;
            tasks_ = tasks;
            next_ = 0;
            busy_ = workers_ - 1;
            error_ = nullptr;
            ++generation_;
        }
        wake_.notify_all();
        drain();
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return busy_ == 0; });
        job_ = nullptr;
        if (error_)
            std::rethrow_exception(error_);
    }

  private:
    void drain() {
        for (;;) {
            std::size_t t = 0;
            std::function<void(std::size_t)>* job = nullptr;
            {
                std::lock_guard lock(mutex_);
                if (next_ >= tasks_)
                    return;
                t = next_++;
                job = job_;
            }
            try {
                (*job)(t);
            } catch (...) {
                std::lock_guard lock(mutex_);
                if (!error_)
                    error_ = std::current_exception();
                next_ = tasks_;
            }
        }
    }

    void loop() {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_)
                    return;
            }
            drain();
            {
                std::lock_guard lock(mutex_);
                --busy_;
            }
            done_.notify_one();
        }
    }

    unsigned workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t tasks_ = 0;
    std::size_t next_ = 0;
    unsigned busy_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

} // namespace slbm

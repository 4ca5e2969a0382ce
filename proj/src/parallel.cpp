#include "reslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace reslab {

namespace {
int initial_threads() {
    if (const char* env = std::getenv("RESLAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

std::atomic<int>& thread_setting() {
    static std::atomic<int> value{initial_threads()};
    return value;
}
}  // namespace

int default_threads() { return thread_setting().load(); }

void set_default_threads(int n) { thread_setting().store(std::max(1, n)); }

namespace {
// Nested calls run inline so an outer parallel loop owns all workers.
thread_local bool in_worker = false;

struct WorkerScope {
    bool saved;
    WorkerScope() : saved(in_worker) { in_worker = true; }
    ~WorkerScope() { in_worker = saved; }
};
}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads) {
    if (threads <= 0) threads = default_threads();
    const std::size_t workers =
        in_worker ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        WorkerScope scope;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace reslab

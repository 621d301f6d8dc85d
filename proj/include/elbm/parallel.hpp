#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace elbm {

/// Fixed-size worker pool executing tiled index ranges. Work is split into
/// tiles of a fixed size independent of the worker count; reductions store one
/// partial per tile and are combined in tile order, so results are bitwise
/// identical for any number of workers.
class WorkerPool {
 public:
  static constexpr std::size_t kTile = 4096;

  explicit WorkerPool(std::size_t workers) : workers_(workers == 0 ? 1 : workers) {
    for (std::size_t w = 1; w < workers_; ++w)
      threads_.emplace_back([this] { worker_loop(); });
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::size_t workers() const { return workers_; }

  static std::size_t num_tiles(std::size_t n) { return (n + kTile - 1) / kTile; }

  /// Runs fn(begin, end, tile_index) over [0, n) split into fixed tiles.
  /// Blocks until all tiles are done.
  void for_tiles(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t ntiles = num_tiles(n);
    if (workers_ == 1 || ntiles == 1) {
      for (std::size_t t = 0; t < ntiles; ++t)
        fn(t * kTile, std::min(n, (t + 1) * kTile), t);
      return;
    }
    auto job = std::make_shared<Job>();
    job->n = n;
    job->ntiles = ntiles;
    job->fn = &fn;
    job->pending.store(ntiles, std::memory_order_relaxed);
    {
      std::lock_guard<std::mutex> lk(mu_);
      job_ = job;
      ++generation_;
    }
    cv_.notify_all();
    run_job(*job);
    std::unique_lock<std::mutex> lk(mu_);
    done_cv_.wait(lk, [&] { return job->pending.load(std::memory_order_acquire) == 0; });
  }

  /// Tile-wise sum reduction: partial[tile] = fn(begin, end), combined in tile
  /// order on the calling thread.
  double reduce_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn) {
    std::vector<double> partials(num_tiles(n), 0.0);
    for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t tile) {
      partials[tile] = fn(b, e);
    });
    double s = 0.0;
    for (double p : partials) s += p;
    return s;
  }

  /// Tile-wise max reduction, combined in tile order.
  double reduce_max(std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn) {
    std::vector<double> partials(num_tiles(n), 0.0);
    for_tiles(n, [&](std::size_t b, std::size_t e, std::size_t tile) {
      partials[tile] = fn(b, e);
    });
    double m = 0.0;
    for (double p : partials) m = std::max(m, p);
    return m;
  }

 private:
  struct Job {
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> pending{0};
    std::size_t n = 0;
    std::size_t ntiles = 0;
    const std::function<void(std::size_t, std::size_t, std::size_t)>* fn = nullptr;
  };

  void run_job(Job& job) {
    for (;;) {
      const std::size_t t = job.next.fetch_add(1, std::memory_order_relaxed);
      if (t >= job.ntiles) break;
      (*job.fn)(t * kTile, std::min(job.n, (t + 1) * kTile), t);
      if (job.pending.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        std::lock_guard<std::mutex> lk(mu_);
        done_cv_.notify_all();
      }
    }
  }

  void worker_loop() {
    std::size_t seen = 0;
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        job = job_;
      }
      if (job) run_job(*job);
    }
  }

  std::size_t workers_;
  std::vector<std::thread> threads_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::shared_ptr<Job> job_;
  std::size_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace elbm

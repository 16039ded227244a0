#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace recomb {

// Monte Carlo point estimate with its standard error and sample count.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
};

// Associative (count, sum, sum of squares) accumulator.  Partial
// accumulators from independent tasks merge in task-index order, so the
// final numbers do not depend on the thread count.
struct MeanAccumulator {
    std::int64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const MeanAccumulator& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double se() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
    Estimate estimate() const { return {mean(), se(), n}; }
};

// Bernoulli frequency accumulator.
struct CountAccumulator {
    std::int64_t n = 0;
    std::int64_t hits = 0;

    void add(bool hit) {
        ++n;
        hits += hit ? 1 : 0;
    }
    void merge(const CountAccumulator& o) {
        n += o.n;
        hits += o.hits;
    }
    double mean() const { return n > 0 ? static_cast<double>(hits) / static_cast<double>(n) : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        double p = mean();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    }
    Estimate estimate() const { return {mean(), se(), n}; }
};

// Runs fn(task) for task = 0..n_tasks-1 on up to n_threads workers.
// Each task writes only to its own slot, so results are identical for
// every thread count.
inline void run_tasks(int n_tasks, int n_threads, const std::function<void(int)>& fn) {
    if (n_threads <= 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n_tasks) break;
            fn(i);
        }
    };
    int workers = n_threads < n_tasks ? n_threads : n_tasks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace recomb

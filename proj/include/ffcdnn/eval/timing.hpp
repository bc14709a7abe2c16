#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ffcdnn::eval {

template <class Fn>
double time_run(Fn&& task) {
    const auto t0 = std::chrono::steady_clock::now();
    task();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TimingStats {
    std::vector<double> seconds;

    double mean() const {
        double s = 0;
        for (double v : seconds) s += v;
        return seconds.empty() ? 0.0 : s / static_cast<double>(seconds.size());
    }
    double stddev() const {
        if (seconds.size() < 2) return 0.0;
        const double m = mean();
        double s = 0;
        for (double v : seconds) s += (v - m) * (v - m);
        return std::sqrt(s / static_cast<double>(seconds.size() - 1));
    }
    /// Coefficient of variation; 0 for a zero mean.
    double cv() const { return mean() > 0.0 ? stddev() / mean() : 0.0; }
    double min() const {
        double m = seconds.empty() ? 0.0 : seconds.front();
        for (double v : seconds) m = std::min(m, v);
        return m;
    }
};

template <class Fn>
TimingStats time_repeated(Fn&& task, std::size_t reps) {
    TimingStats st;
    for (std::size_t r = 0; r < reps; ++r) st.seconds.push_back(time_run(task));
    return st;
}

} // namespace ffcdnn::eval

#include "eegclf/fft.hpp"

#include <mutex>

#include <fftw3.h>

#include "eegclf/errors.hpp"

namespace eegclf {

namespace {
// FFTW's planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft::Plan {
    std::size_t n = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;

    explicit Plan(std::size_t size) : n(size) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        in = fftw_alloc_complex(n);
        out = fftw_alloc_complex(n);
        if (!in || !out) {
            throw Error("fftw buffer allocation failed");
        }
        // FFTW_ESTIMATE keeps plan selection deterministic (no measurement
        // runs), which keeps transform output bit-stable across processes.
        plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan) {
            throw Error("fftw plan creation failed");
        }
    }

    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }

    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

Fft::Fft() = default;
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

Fft::Plan& Fft::plan_for(std::size_t n) {
    if (n == 0) {
        throw Error("fft of an empty signal");
    }
    auto it = plans_.find(n);
    if (it == plans_.end()) {
        it = plans_.emplace(n, std::make_unique<Plan>(n)).first;
    }
    return *it->second;
}

Spectrum Fft::transform(std::span<const double> x, double sample_rate_hz) {
    Plan& p = plan_for(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        p.in[t][0] = x[t];
        p.in[t][1] = 0.0;
    }
    fftw_execute(p.plan);

    Spectrum s;
    s.bin_hz = sample_rate_hz / static_cast<double>(x.size());
    s.bins.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        s.bins[k] = {p.out[k][0], p.out[k][1]};
    }
    return s;
}

double Fft::spectral_energy(std::span<const double> x) {
    Plan& p = plan_for(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        p.in[t][0] = x[t];
        p.in[t][1] = 0.0;
    }
    fftw_execute(p.plan);

    // Fixed summation order (k ascending) for run-to-run determinism.
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        acc += p.out[k][0] * p.out[k][0] + p.out[k][1] * p.out[k][1];
    }
    return acc / static_cast<double>(x.size());
}

}  // namespace eegclf

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace eegclf {

// Full two-sided discrete spectrum of a real signal; bins.size() equals the
// input length (unnormalized DFT, FFTW convention).
struct Spectrum {
    std::vector<std::complex<double>> bins;
    double bin_hz = 0.0;
};

// Thin wrapper over FFTW double-precision complex transforms, with plan reuse
// per input length. Handles arbitrary lengths (not just powers of two).
//
// Instances are not thread safe; give each worker thread its own Fft.
// Separate instances may run concurrently (plan creation is serialized
// internally, as FFTW requires).
class Fft {
public:
    Fft();
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    Spectrum transform(std::span<const double> x, double sample_rate_hz);

    // (1/N) * sum_k |X[k]|^2 over all N bins. With this normalization the
    // value equals the time-domain sum of squares (Parseval), which is what
    // downstream energy features rely on.
    double spectral_energy(std::span<const double> x);

private:
    struct Plan;
    Plan& plan_for(std::size_t n);

    std::map<std::size_t, std::unique_ptr<Plan>> plans_;
};

}  // namespace eegclf

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>

#include "mocz/types.hpp"

namespace mocz {

// Thin RAII wrapper over an FFTW complex-to-complex plan.
//
// Transforms are unnormalized: forward computes sum x[n] e^{-j2pi kn/N},
// backward computes sum X[k] e^{+j2pi kn/N}. Planning is serialized
// internally; execute() is safe to call concurrently on one plan.
class FftPlan {
public:
    enum class Direction { Forward, Backward };

    FftPlan(std::size_t n, Direction dir);
    ~FftPlan();
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const { return n_; }

    // in and out must both have size() elements; they may alias.
    void execute(std::span<const cdouble> in, std::span<cdouble> out) const;

private:
    struct Impl;
    std::size_t n_ = 0;
    std::unique_ptr<Impl> impl_;
};

// One-shot helpers for code paths where plan reuse does not matter.
CVec fft(std::span<const cdouble> x);
CVec ifft(std::span<const cdouble> x); // normalized by 1/N

std::size_t next_pow2(std::size_t n);

} // namespace mocz

// SPDX-License-Identifier: Apache-2.0

#include "mocz/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mocz {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct FftPlan::Impl {
    fftw_plan plan = nullptr;
};

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n), impl_(std::make_unique<Impl>())
{
    if (n == 0)
        throw std::invalid_argument("FftPlan: size must be positive");
    // In-place plan on scratch; execute() always runs in place on the
    // caller's buffer via fftw_execute_dft, so alignment is not assumed.
    std::vector<fftw_complex> a(n);
    std::lock_guard lock(planner_mutex());
    impl_->plan = fftw_plan_dft_1d(static_cast<int>(n), a.data(), a.data(),
                                   dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!impl_->plan)
        throw std::runtime_error("FftPlan: fftw planning failed");
}

FftPlan::~FftPlan()
{
    if (impl_ && impl_->plan) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(impl_->plan);
    }
}

FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::span<const cdouble> in, std::span<cdouble> out) const
{
    if (in.size() != n_ || out.size() != n_)
        throw std::invalid_argument("FftPlan::execute: buffer size mismatch");
    // std::complex<double> is layout-compatible with fftw_complex.
    if (static_cast<const void*>(in.data()) != static_cast<const void*>(out.data()))
        std::copy(in.begin(), in.end(), out.begin());
    auto* io = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(impl_->plan, io, io);
}

namespace {
const FftPlan& cached_plan(std::size_t n, FftPlan::Direction dir)
{
    thread_local std::map<std::pair<std::size_t, FftPlan::Direction>, FftPlan> cache;
    const auto key = std::make_pair(n, dir);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, FftPlan(n, dir)).first;
    return it->second;
}
} // namespace

CVec fft(std::span<const cdouble> x)
{
    CVec out(x.size());
    cached_plan(x.size(), FftPlan::Direction::Forward).execute(x, out);
    return out;
}

CVec ifft(std::span<const cdouble> x)
{
    CVec out(x.size());
    cached_plan(x.size(), FftPlan::Direction::Backward).execute(x, out);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out)
        v *= scale;
    return out;
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace mocz

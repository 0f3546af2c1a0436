// SPDX-License-Identifier: Apache-2.0
//
// DiZeT: direct zero testing. For every zero position k the decoder
// compares |Y(z)| at the outer and inner candidate zero; the designed zero
// makes one of the two vanish (up to noise), independently of any channel
// polynomial H(z) that multiplies X(z).

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mocz/fft.hpp"
#include "mocz/huffman.hpp"

namespace mocz {

struct DecodedBits {
    BitMessage bits;
    // log(inner / c-) - log(outer / c+); positive means bit 1.
    std::vector<double> margins;
};

// Y(z) = sum_n y_n z^n by Horner's rule.
cdouble eval_at_point(std::span<const cdouble> y, cdouble z);

// c+ = ||(R^n)||_2 and c- = ||(R^-n)||_2 for n = 0..N-1.
std::pair<double, double> dizet_weights(double R, std::size_t N);

// Reference decoder: 2K Horner evaluations. Throws InsufficientLength when
// y.size() < K + 1.
DecodedBits dizet_decode(std::span<const cdouble> y, const ModulationParams& p);

// Same decision rule with the 2K evaluations done as two radius-weighted
// K-point DFTs of the received samples folded modulo K. Holds FFTW plans,
// so construct once per K and reuse; decode() is const and thread-safe.
class DizetDecoder {
public:
    explicit DizetDecoder(const ModulationParams& p);

    const ModulationParams& params() const { return params_; }

    // |Y(R e^{j theta_k})| and |Y(R^-1 e^{j theta_k})|, unnormalized.
    void test_magnitudes(std::span<const cdouble> y, std::span<double> outer,
                         std::span<double> inner) const;

    DecodedBits decode(std::span<const cdouble> y) const;

private:
    ModulationParams params_;
    FftPlan plan_;
};

} // namespace mocz

// SPDX-License-Identifier: Apache-2.0
//
// Binary modulation on conjugate-reciprocal zeros (BMOCZ) with Huffman
// sequences. Each bit picks one zero of a degree-K polynomial from the pair
// {R e^{j theta_k}, R^{-1} e^{j theta_k}}; the coefficients of that
// polynomial are the transmitted samples.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mocz/types.hpp"

namespace mocz {

// R = sqrt(1 + 2 lambda sin(pi/K)). Throws InvalidParameter for K < 2 or
// lambda <= 0 (K = 1 would put the zeros on the unit circle).
double derive_radius(int K, double lambda);

// eta = 1 / (R^K + R^-K), the magnitude of the two autocorrelation side
// peaks. Throws InvalidParameter for R <= 1 or K < 1.
double derive_eta(double R, int K);

// Codebook geometry shared by encoder, decoder and radar processing.
struct ModulationParams {
    int K = 0;
    double lambda = 0.0;
    double R = 0.0;
    double eta = 0.0;

    static ModulationParams make(int K, double lambda = 0.5);
    // Explicit outer radius; lambda is back-computed when K >= 2.
    static ModulationParams from_radius(int K, double R);

    double base_angle() const { return 2.0 * kPi / K; }
};

struct BitMessage {
    std::vector<std::uint8_t> bits;

    BitMessage() = default;
    explicit BitMessage(std::vector<std::uint8_t> b);

    // Message number `index` with bit k = bit (K-1-k) of index, so
    // enumerating index = 0..2^K-1 walks every message with m_1 as MSB.
    static BitMessage from_index(std::uint64_t index, int K);
    // '0'/'1' characters, first character is m_1.
    static BitMessage from_binary(std::string_view s);

    std::size_t size() const { return bits.size(); }
    int weight() const;
    std::string to_string() const;

    friend bool operator==(const BitMessage&, const BitMessage&) = default;
};

struct ZeroPattern {
    CVec zeros;
};

struct BasebandSequence {
    CVec samples;
    double sample_period = 0.0;

    double energy() const;
};

// Aperiodic autocorrelation; coeffs[n] holds lag n - max_lag.
struct Autocorrelation {
    CVec coeffs;

    int max_lag() const { return static_cast<int>(coeffs.size() / 2); }
    cdouble at_lag(int lag) const { return coeffs.at(static_cast<std::size_t>(lag + max_lag())); }
};

ZeroPattern encode_zeros(const BitMessage& m, const ModulationParams& p);

// Precomputes the multiplication order for repeated encoding at one K.
class HuffmanEncoder {
public:
    explicit HuffmanEncoder(const ModulationParams& p);

    const ModulationParams& params() const { return params_; }
    BasebandSequence encode(const BitMessage& m, double sample_period = 0.0) const;

private:
    ModulationParams params_;
    std::vector<int> order_;
};

BasebandSequence encode(const BitMessage& m, const ModulationParams& p);

Autocorrelation autocorrelation(std::span<const cdouble> x);
inline Autocorrelation autocorrelation(const BasebandSequence& x) { return autocorrelation(x.samples); }

// E|x_0|^2 = E|x_K|^2 over uniformly random messages.
double expected_end_energy(const ModulationParams& p);

// Closed forms of (x_0, x_K) for a message of the given Hamming weight.
std::pair<double, double> end_coefficients(int weight, const ModulationParams& p);

// Leja ordering of the K-th roots of unity starting at index 0. Partial
// products taken in this order stay well conditioned.
std::vector<int> leja_order(int K);

} // namespace mocz

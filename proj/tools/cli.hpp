// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mocz/huffman.hpp"

namespace mocz::cli {

enum ExitCode : int { kOk = 0, kBadConfig = 2, kIoFailure = 3, kInternal = 4 };

// "0b1010" binary, "0x1f" hex, or bare digits: binary when the string is
// exactly K characters of 0/1, hex otherwise. Hex expands MSB first and is
// right-aligned to K bits; dropped leading bits must be zero.
BitMessage parse_bits(const std::string& text, int K);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mocz::cli

#pragma once

#include <filesystem>
#include <string>

#include "nacs/functional.hpp"

namespace nacs {

/// Plot-friendly dump: '#'-prefixed header lines (geometry, grid sizes,
/// extents, means, convergence flag, column names) followed by one row
/// x,y,u1,u2,v1,v2 per node in storage order.
void write_field_csv(const std::filesystem::path &path, const SolveResult &r);

/// Raw little-endian twin of the CSV: magic "NACSFLD1", geometry, M1, M2,
/// the two domain extents, c1, c2, converged flag, then u1, u2, v1, v2.
void write_field_binary(const std::filesystem::path &path,
                        const SolveResult &r);

/// Inverse of write_field_binary; bit exact. Throws std::runtime_error on
/// malformed input.
SolveResult read_field_binary(const std::filesystem::path &path);

} // namespace nacs

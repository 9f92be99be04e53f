#pragma once

#include <cstdint>
#include <string>

#include "fracdiff/field.hpp"
#include "fracdiff/kernel.hpp"

namespace fracdiff {

/// FNV-1a over a byte range.
uint64_t fnv1a(const void* data, size_t n_bytes, uint64_t seed = 1469598103934665603ull);

/// Flat little-endian doubles at <path_base>.bin plus a JSON sidecar at
/// <path_base>.json carrying grids, parameters and the payload checksum.
void save_kernel_table(const KernelTable& table, const std::string& path_base);
KernelTable load_kernel_table(const std::string& path_base);

void save_field(const Field& field, double alpha, const std::string& path_base);
/// Returns the field; alpha_out (optional) receives the stored parameter.
Field load_field(const std::string& path_base, double* alpha_out = nullptr);

}  // namespace fracdiff

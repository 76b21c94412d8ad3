// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model/model.hpp"

namespace bgcnn {

inline constexpr char kModelMagic[4] = {'B', 'G', 'C', 'N'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Little-endian model file:
///   "BGCN" | u32 version | u64 total file length
///   | u32 n_fields, per field: u16 name length, name, u8 type (0 u64, 1 f64), 8 value bytes
///   | u32 n_tensors, per tensor: u16 name length, name, u32 rank, u32 dims..., f32 payload
///   | u32 CRC-32 of every preceding byte
std::vector<std::uint8_t> serialize_model(ModelParams<float>& params);

/// Inverse of serialize_model. Throws ModelFormatError with kind BadMagic,
/// BadVersion, Truncated (file shorter than its declared length), Checksum
/// or Malformed (well-formed bytes that do not describe a valid model).
ModelParams<float> deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(ModelParams<float>& params, const std::string& path);
/// Throws NotFoundError when the file cannot be opened.
ModelParams<float> load_model(const std::string& path);

}  // namespace bgcnn

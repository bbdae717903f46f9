#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attrflow {

// One named tensor in the flat checkpoint container. Values are always
// 32-bit floats on disk regardless of the in-memory scalar type.
struct CheckpointEntry {
    std::string name;
    std::vector<uint64_t> extents;
    std::vector<float> values;
};

// Flat binary container: magic "ACMP", version u32, entry count u32, then
// per entry: name length u32 + UTF-8 name, rank u32, extents (u64 each),
// little-endian f32 values. Byte-exact round-trip is part of the contract.
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> load_checkpoint(const std::string& path);

// FNV-1a over the serialized bytes of the selected entries (those whose
// name starts with `prefix`); used to pin adapter checkpoints to the base
// they were trained against.
uint64_t checkpoint_hash(const std::vector<CheckpointEntry>& entries,
                         const std::string& prefix = "");

std::string hash_hex(uint64_t h);

}  // namespace attrflow

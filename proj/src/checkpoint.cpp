#include "attrflow/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace attrflow {

namespace {

const char kMagic[4] = {'A', 'C', 'M', 'P'};

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const std::string& buf, size_t& off) {
    if (off + 4 > buf.size()) throw std::runtime_error("checkpoint: truncated u32");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[off + i])) << (8 * i);
    off += 4;
    return v;
}

uint64_t get_u64(const std::string& buf, size_t& off) {
    if (off + 8 > buf.size()) throw std::runtime_error("checkpoint: truncated u64");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[off + i])) << (8 * i);
    off += 8;
    return v;
}

std::string serialize(const std::vector<CheckpointEntry>& entries) {
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kCheckpointVersion);
    put_u32(buf, static_cast<uint32_t>(entries.size()));
    for (const auto& e : entries) {
        put_u32(buf, static_cast<uint32_t>(e.name.size()));
        buf.append(e.name);
        put_u32(buf, static_cast<uint32_t>(e.extents.size()));
        uint64_t numel = 1;
        for (uint64_t ext : e.extents) {
            put_u64(buf, ext);
            numel *= ext;
        }
        if (numel != e.values.size())
            throw std::runtime_error("checkpoint: entry '" + e.name + "' has " +
                                     std::to_string(e.values.size()) + " values but extents imply " +
                                     std::to_string(numel));
        for (float v : e.values) {
            uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_u32(buf, bits);
        }
    }
    return buf;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries) {
    const std::string buf = serialize(entries);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

std::vector<CheckpointEntry> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open for read: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    size_t off = 0;
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw std::runtime_error("checkpoint: bad magic bytes in " + path);
    off = 4;
    const uint32_t version = get_u32(buf, off);
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    const uint32_t count = get_u32(buf, off);
    std::vector<CheckpointEntry> entries(count);
    for (uint32_t i = 0; i < count; ++i) {
        auto& e = entries[i];
        const uint32_t name_len = get_u32(buf, off);
        if (off + name_len > buf.size()) throw std::runtime_error("checkpoint: truncated name");
        e.name.assign(buf, off, name_len);
        off += name_len;
        const uint32_t rank = get_u32(buf, off);
        uint64_t numel = 1;
        e.extents.resize(rank);
        for (uint32_t r = 0; r < rank; ++r) {
            e.extents[r] = get_u64(buf, off);
            numel *= e.extents[r];
        }
        e.values.resize(numel);
        for (uint64_t v = 0; v < numel; ++v) {
            const uint32_t bits = get_u32(buf, off);
            std::memcpy(&e.values[v], &bits, 4);
        }
    }
    if (off != buf.size()) throw std::runtime_error("checkpoint: trailing bytes in " + path);
    return entries;
}

uint64_t checkpoint_hash(const std::vector<CheckpointEntry>& entries, const std::string& prefix) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const char* p, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= static_cast<uint8_t>(p[i]);
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& e : entries) {
        if (!prefix.empty() && e.name.rfind(prefix, 0) != 0) continue;
        feed(e.name.data(), e.name.size());
        for (uint64_t ext : e.extents) feed(reinterpret_cast<const char*>(&ext), 8);
        feed(reinterpret_cast<const char*>(e.values.data()), e.values.size() * 4);
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace attrflow

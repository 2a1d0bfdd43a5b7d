#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "earsym/csv.hpp"
#include "earsym/embedding.hpp"
#include "earsym/error.hpp"

namespace earsym {

// On-disk layout (little-endian): magic "EARB", u32 version = 1, u32 dim,
// u32 count, then count*dim f32 values row-major. A companion index CSV with
// header `row,id` maps binary rows to image ids.

inline constexpr std::uint32_t kStoreVersion = 1;

struct EmbeddingStore {
    int dim = 0;
    std::vector<std::string> ids;
    std::vector<double> values;  // ids.size() x dim, row-major

    std::size_t count() const { return ids.size(); }

    void add(const std::string& id, const Embedding& e) {
        if (dim == 0) dim = static_cast<int>(e.size());
        if (static_cast<int>(e.size()) != dim)
            throw DimMismatch("embedding store: expected dim " + std::to_string(dim) + ", got " +
                              std::to_string(e.size()));
        ids.push_back(id);
        values.insert(values.end(), e.begin(), e.end());
    }

    Embedding row(std::size_t i) const {
        return Embedding(values.begin() + static_cast<std::ptrdiff_t>(i) * dim,
                         values.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim);
    }

    std::unordered_map<std::string, Embedding> to_map() const {
        std::unordered_map<std::string, Embedding> m;
        m.reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], row(i));
        return m;
    }

    /// Round every value through f32, as a save/load cycle would.
    void quantize_f32() {
        for (double& v : values) v = static_cast<double>(static_cast<float>(v));
    }
};

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string default_index_path(const std::string& store_path) {
    std::size_t slash = store_path.find_last_of('/');
    std::string dir = slash == std::string::npos ? std::string() : store_path.substr(0, slash + 1);
    return dir + "index.csv";
}

inline void save_store(const EmbeddingStore& store, const std::string& bin_path, const std::string& index_path) {
    std::string blob;
    blob.reserve(16 + store.values.size() * 4);
    blob += "EARB";
    detail::put_u32_le(blob, kStoreVersion);
    detail::put_u32_le(blob, static_cast<std::uint32_t>(store.dim));
    detail::put_u32_le(blob, static_cast<std::uint32_t>(store.count()));
    for (double v : store.values)
        detail::put_u32_le(blob, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    write_text_file(bin_path, blob);

    std::ostringstream idx;
    idx << "row,id\n";
    for (std::size_t i = 0; i < store.ids.size(); ++i) idx << i << ',' << store.ids[i] << '\n';
    write_text_file(index_path, idx.str());
}

inline EmbeddingStore load_store(const std::string& bin_path, const std::string& index_path) {
    std::string blob = read_text_file(bin_path);
    if (blob.size() < 16) throw TruncatedFile(bin_path + ": shorter than the store header");
    const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
    if (std::memcmp(p, "EARB", 4) != 0) throw MagicMismatch(bin_path + ": bad magic, expected 'EARB'");
    std::uint32_t version = detail::get_u32_le(p + 4);
    if (version != kStoreVersion)
        throw ParseError(bin_path + ": unsupported store version " + std::to_string(version));
    std::uint32_t dim = detail::get_u32_le(p + 8);
    std::uint32_t count = detail::get_u32_le(p + 12);
    if (dim == 0) throw DimMismatch(bin_path + ": store dim is zero");
    std::size_t expect = 16 + static_cast<std::size_t>(dim) * count * 4;
    if (blob.size() < expect) throw TruncatedFile(bin_path + ": raster shorter than header promises");
    if (blob.size() > expect) throw ParseError(bin_path + ": trailing bytes after embedding data");

    EmbeddingStore store;
    store.dim = static_cast<int>(dim);
    store.values.resize(static_cast<std::size_t>(dim) * count);
    for (std::size_t i = 0; i < store.values.size(); ++i) {
        std::uint32_t bits = detail::get_u32_le(p + 16 + i * 4);
        store.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }

    std::vector<std::string> lines = read_lines(index_path);
    if (lines.empty() || lines[0] != "row,id")
        throw ParseError(index_path + ":1: expected header 'row,id'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> f = split_csv_line(lines[i]);
        if (f.size() != 2) throw ParseError(index_path + ":" + std::to_string(i + 1) + ": expected 2 fields");
        long long row = parse_int_field(f[0], index_path, i + 1);
        if (row != static_cast<long long>(store.ids.size()))
            throw ParseError(index_path + ":" + std::to_string(i + 1) + ": rows must be consecutive from 0");
        store.ids.push_back(f[1]);
    }
    if (store.ids.size() != count)
        throw TruncatedFile(index_path + ": index has " + std::to_string(store.ids.size()) +
                            " rows but the binary store has " + std::to_string(count));
    return store;
}

}  // namespace earsym

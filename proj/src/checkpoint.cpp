#include "gfnlab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian; big-endian hosts are unsupported");

namespace gfnlab {

namespace {

using nlohmann::json;

Eigen::Index rows_of(const std::vector<int>& shape) {
    return shape.size() >= 2 ? shape[0] : 1;
}

Eigen::Index cols_of(const std::vector<int>& shape) {
    if (shape.empty()) return 1;
    return shape.size() >= 2 ? shape[1] : shape[0];
}

int64_t count_of(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

}  // namespace

void save_blob(const std::string& path, const std::vector<BlobEntry>& entries) {
    json header;
    header["format_version"] = 1;
    json plist = json::array();
    int64_t offset = 0;
    for (const auto& e : entries) {
        json p;
        p["name"] = e.name;
        p["shape"] = e.shape;
        p["offset"] = offset;
        plist.push_back(std::move(p));
        offset += count_of(e.shape) * static_cast<int64_t>(sizeof(double));
    }
    header["params"] = std::move(plist);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open checkpoint for writing: " + path);
    f << header.dump() << '\n';
    for (const auto& e : entries) {
        // row-major serialization regardless of Eigen's internal layout
        for (Eigen::Index r = 0; r < e.data.rows(); ++r)
            for (Eigen::Index c = 0; c < e.data.cols(); ++c) {
                double v = e.data(r, c);
                f.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
    }
    if (!f) throw FormatError("short write while saving checkpoint: " + path);
}

std::vector<BlobEntry> load_blob(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open checkpoint: " + path);
    std::string header_line;
    if (!std::getline(f, header_line)) throw FormatError("checkpoint missing header: " + path);

    json header;
    try {
        header = json::parse(header_line);
    } catch (const json::exception& e) {
        throw FormatError("checkpoint header is not valid JSON: " + std::string(e.what()));
    }
    if (!header.contains("format_version") || header["format_version"] != 1)
        throw FormatError("unsupported checkpoint format_version");
    if (!header.contains("params") || !header["params"].is_array())
        throw FormatError("checkpoint header missing params list");

    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::vector<BlobEntry> entries;
    for (const auto& p : header["params"]) {
        if (!p.contains("name") || !p.contains("shape") || !p.contains("offset"))
            throw FormatError("checkpoint header entry missing fields");
        BlobEntry e;
        e.name = p["name"].get<std::string>();
        e.shape = p["shape"].get<std::vector<int>>();
        int64_t offset = p["offset"].get<int64_t>();
        int64_t count = count_of(e.shape);
        if (e.shape.empty() || count <= 0) throw FormatError("bad shape for " + e.name);
        if (offset < 0 ||
            offset + count * static_cast<int64_t>(sizeof(double)) >
                static_cast<int64_t>(blob.size()))
            throw FormatError("checkpoint blob truncated at " + e.name);
        e.data.resize(rows_of(e.shape), cols_of(e.shape));
        const char* src = blob.data() + offset;
        for (Eigen::Index r = 0; r < e.data.rows(); ++r)
            for (Eigen::Index c = 0; c < e.data.cols(); ++c) {
                double v;
                std::memcpy(&v, src, sizeof(double));
                src += sizeof(double);
                e.data(r, c) = v;
            }
        entries.push_back(std::move(e));
    }
    return entries;
}

void save_checkpoint(const std::string& path, const std::vector<const Parameter*>& params) {
    std::vector<BlobEntry> entries;
    entries.reserve(params.size());
    for (const Parameter* p : params)
        entries.push_back(BlobEntry{p->name, p->shape, p->value});
    save_blob(path, entries);
}

void load_checkpoint(const std::string& path, const std::vector<Parameter*>& params) {
    auto entries = load_blob(path);
    if (entries.size() != params.size())
        throw FormatError("checkpoint parameter count mismatch");
    std::map<std::string, const BlobEntry*> by_name;
    for (const auto& e : entries) by_name[e.name] = &e;
    // Validate everything before assigning anything.
    for (const Parameter* p : params) {
        auto it = by_name.find(p->name);
        if (it == by_name.end()) throw FormatError("checkpoint missing parameter " + p->name);
        if (it->second->shape != p->shape)
            throw FormatError("checkpoint shape mismatch for " + p->name);
    }
    for (Parameter* p : params) p->value = by_name[p->name]->data;
}

}  // namespace gfnlab

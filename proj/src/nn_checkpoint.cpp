#include "tabfact/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace tabfact::nn {

namespace {

constexpr char kMagic[8] = {'T', 'F', 'C', 'K', 'P', 'T', '\0', '\n'};

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
        if (!out_) throw Error("cannot open checkpoint '" + path.string() + "' for writing");
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void u32(std::uint32_t v) { bytes(&v, sizeof v); }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void tensors(const std::vector<NamedTensor>& ts) {
        u64(ts.size());
        for (const auto& t : ts) {
            str(t.name);
            u64(static_cast<std::uint64_t>(t.rows));
            u64(static_cast<std::uint64_t>(t.cols));
            bytes(t.values.data(), t.values.size() * sizeof(double));
        }
    }
    void finish() {
        out_.flush();
        if (!out_) throw Error("write to checkpoint '" + path_.string() + "' failed");
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw Error("cannot open checkpoint '" + path.string() + "'");
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw Error("checkpoint '" + path_.string() + "' is truncated");
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::string str() {
        const auto n = u64();
        if (n > (1ull << 32)) throw Error("checkpoint '" + path_.string() + "' is corrupt");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    std::vector<NamedTensor> tensors() {
        const auto n = u64();
        if (n > (1ull << 20)) throw Error("checkpoint '" + path_.string() + "' is corrupt");
        std::vector<NamedTensor> out;
        for (std::uint64_t i = 0; i < n; ++i) {
            NamedTensor t;
            t.name = str();
            t.rows = static_cast<long>(u64());
            t.cols = static_cast<long>(u64());
            if (t.rows < 0 || t.cols < 0 || t.rows * t.cols > (1l << 31))
                throw Error("checkpoint '" + path_.string() + "' has a corrupt tensor header");
            t.values.resize(static_cast<std::size_t>(t.rows * t.cols));
            bytes(t.values.data(), t.values.size() * sizeof(double));
            out.push_back(std::move(t));
        }
        return out;
    }

private:
    std::ifstream in_;
    std::filesystem::path path_;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    Writer w(path);
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.str(data.meta_json);
    w.tensors(data.params);
    w.tensors(data.adam_m);
    w.tensors(data.adam_v);
    w.u64(static_cast<std::uint64_t>(data.adam_step));
    w.finish();
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[sizeof kMagic];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error("'" + path.string() + "' is not a tabfact checkpoint");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw Error("checkpoint '" + path.string() + "' has format version " + std::to_string(version) +
                    ", expected " + std::to_string(kCheckpointVersion));
    }
    CheckpointData d;
    d.meta_json = r.str();
    d.params = r.tensors();
    d.adam_m = r.tensors();
    d.adam_v = r.tensors();
    d.adam_step = static_cast<long>(r.u64());
    return d;
}

}  // namespace tabfact::nn

#include "thermovis/model/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "thermovis/core/error.hpp"

namespace thermovis {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

constexpr char kMagic[4] = {'T', 'V', 'W', 'S'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::format_error, "weight store truncated at byte " + std::to_string(pos_));
        }
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void floats(float* dst, std::size_t n) {
        if (n > (bytes_.size() - pos_) / sizeof(float)) need(bytes_.size() + 1 - pos_);
        std::memcpy(dst, bytes_.data() + pos_, n * sizeof(float));
        pos_ += n * sizeof(float);
    }
    bool done() const { return pos_ == bytes_.size(); }
    std::size_t pos() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> WeightStore::serialize() const {
    std::vector<std::uint8_t> out;
    put_bytes(out, kMagic, 4);
    put_u32(out, version);
    put_u32(out, static_cast<std::uint32_t>(fingerprint.size()));
    put_bytes(out, fingerprint.data(), fingerprint.size());
    put_u32(out, static_cast<std::uint32_t>(order.size()));
    for (const std::string& name : order) {
        const NamedTensor& t = tensors.at(name);
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        put_bytes(out, name.data(), name.size());
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
        put_bytes(out, t.values.data(), t.values.size() * sizeof(float));
    }
    return out;
}

WeightStore WeightStore::deserialize(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (r.str(4) != std::string(kMagic, 4)) throw Error(ErrorCode::format_error, "not a weight store (bad magic)");
    WeightStore s;
    s.version = r.u32();
    if (s.version != kVersion) {
        throw Error(ErrorCode::format_error, "unsupported weight store version " + std::to_string(s.version));
    }
    s.fingerprint = r.str(r.u32());
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = r.str(r.u32());
        NamedTensor t;
        const std::uint32_t ndim = r.u32();
        if (ndim > 8) throw Error(ErrorCode::format_error, "tensor '" + name + "' has too many dimensions");
        std::size_t numel = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            const std::uint32_t dim = r.u32();
            t.shape.push_back(static_cast<int>(dim));
            numel *= dim;
        }
        if (numel > bytes.size()) r.need(bytes.size() + 1);
        t.values.resize(numel);
        r.floats(t.values.data(), numel);
        if (!s.tensors.emplace(name, std::move(t)).second) {
            throw Error(ErrorCode::format_error, "duplicate tensor '" + name + "'");
        }
        s.order.push_back(std::move(name));
    }
    if (!r.done()) {
        throw Error(ErrorCode::format_error,
                    "unexpected trailing bytes after offset " + std::to_string(r.pos()));
    }
    return s;
}

void WeightStore::write(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path.string());
}

WeightStore WeightStore::read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::not_found, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

WeightStore save_weights(const Model& model) {
    WeightStore s;
    s.fingerprint = model.config().fingerprint();
    for (const Param<float>* p : model.state()) {
        s.order.push_back(p->name);
        s.tensors[p->name] = NamedTensor{p->shape, p->value};
    }
    return s;
}

void load_weights(Model& model, const WeightStore& store) {
    if (store.fingerprint != model.config().fingerprint()) {
        throw Error(ErrorCode::fingerprint_mismatch,
                    "weight store fingerprint " + store.fingerprint.substr(0, 16) +
                        " does not match model config " + model.config().fingerprint().substr(0, 16));
    }
    const auto state = model.state();
    for (const Param<float>* p : state) {
        auto it = store.tensors.find(p->name);
        if (it == store.tensors.end()) {
            throw Error(ErrorCode::shape_mismatch, "weight store is missing tensor '" + p->name + "'");
        }
        if (it->second.shape != p->shape || it->second.values.size() != p->numel()) {
            throw Error(ErrorCode::shape_mismatch, "tensor '" + p->name + "' has the wrong shape");
        }
    }
    if (store.tensors.size() != state.size()) {
        for (const auto& [name, t] : store.tensors) {
            bool known = false;
            for (const Param<float>* p : state) known = known || p->name == name;
            if (!known) throw Error(ErrorCode::shape_mismatch, "weight store has unknown tensor '" + name + "'");
        }
    }
    for (Param<float>* p : model.state()) p->value = store.tensors.at(p->name).values;
}

}  // namespace thermovis

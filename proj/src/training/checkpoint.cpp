#include "thermovis/training/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "thermovis/core/error.hpp"

namespace thermovis {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

template <typename V>
void put(std::vector<std::uint8_t>& out, V v) {
    const auto* b = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), b, b + sizeof(V));
}

void put_floats(std::vector<std::uint8_t>& out, const std::vector<float>& xs) {
    put<std::uint64_t>(out, xs.size());
    const auto* b = reinterpret_cast<const std::uint8_t*>(xs.data());
    out.insert(out.end(), b, b + xs.size() * sizeof(float));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void need(std::uint64_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::format_error, "checkpoint truncated at byte " + std::to_string(pos_));
        }
    }
    template <typename V>
    V get() {
        need(sizeof(V));
        V v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(V));
        pos_ += sizeof(V);
        return v;
    }
    std::vector<std::uint8_t> bytes(std::uint64_t n) {
        need(n);
        std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    std::vector<float> floats() {
        const auto n = get<std::uint64_t>();
        if (n > (bytes_.size() - pos_) / sizeof(float)) need(bytes_.size());
        std::vector<float> out(n);
        std::memcpy(out.data(), bytes_.data() + pos_, n * sizeof(float));
        pos_ += n * sizeof(float);
        return out;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> Checkpoint::serialize() const {
    std::vector<std::uint8_t> out = {'T', 'V', 'C', 'K'};
    put<std::uint32_t>(out, kVersion);
    const auto w = weights.serialize();
    put<std::uint64_t>(out, w.size());
    out.insert(out.end(), w.begin(), w.end());
    put<std::uint64_t>(out, optimizer.step);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(optimizer.m.size()));
    for (std::size_t i = 0; i < optimizer.m.size(); ++i) {
        put_floats(out, optimizer.m[i]);
        put_floats(out, optimizer.v[i]);
    }
    put<double>(out, scheduler.learning_rate);
    put<double>(out, scheduler.best);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(scheduler.bad_epochs));
    put<double>(out, best_validation_loss);
    const std::string h = history.to_json().dump();
    put<std::uint64_t>(out, h.size());
    out.insert(out.end(), h.begin(), h.end());
    return out;
}

Checkpoint Checkpoint::deserialize(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    const auto magic = r.bytes(4);
    if (std::memcmp(magic.data(), "TVCK", 4) != 0) throw Error(ErrorCode::format_error, "not a checkpoint (bad magic)");
    if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorCode::format_error, "unsupported checkpoint version");
    Checkpoint c;
    c.weights = WeightStore::deserialize(r.bytes(r.get<std::uint64_t>()));
    c.optimizer.step = r.get<std::uint64_t>();
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        c.optimizer.m.push_back(r.floats());
        c.optimizer.v.push_back(r.floats());
    }
    c.scheduler.learning_rate = r.get<double>();
    c.scheduler.best = r.get<double>();
    c.scheduler.bad_epochs = static_cast<int>(r.get<std::uint32_t>());
    c.best_validation_loss = r.get<double>();
    const auto h = r.bytes(r.get<std::uint64_t>());
    try {
        c.history = TrainHistory::from_json(nlohmann::json::parse(h.begin(), h.end()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format_error, std::string("checkpoint history: ") + e.what());
    }
    if (!r.done()) throw Error(ErrorCode::format_error, "unexpected trailing bytes in checkpoint");
    return c;
}

void Checkpoint::write(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw Error(ErrorCode::io_error, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::not_found, "cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace thermovis

#include "hmlc/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmlc/errors.hpp"

namespace hmlc {
namespace {

constexpr char kMagic[4] = {'H', 'M', 'L', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& origin)
        : data_(data), origin_(origin) {}

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        if (pos_ + n > data_.size()) fail("truncated");
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    std::uint8_t byte() {
        if (pos_ >= data_.size()) fail("truncated");
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(origin_ + ": " + what + " checkpoint");
    }

    const std::string& data_;
    std::string origin_;
    std::size_t pos_ = 0;
};

std::string activation_name(Activation a) {
    return a == Activation::Relu ? "relu" : "identity";
}

Activation activation_from_name(const std::string& s, const std::string& origin) {
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw ValidationError(origin + ": unknown activation '" + s + "' in checkpoint header");
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& m) {
    if (m.layers.empty()) throw ValidationError("cannot save a model with no layers");

    nlohmann::json header;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.layers) {
        layers.push_back({{"in", l.in}, {"out", l.out}, {"act", activation_name(l.act)}});
    }
    header["arch"] = {{"layers", layers}};
    header["hierarchy_digest"] = m.hierarchy_digest;
    header["policy"] = m.policy_name;
    header["seed"] = m.seed;
    const std::string header_text = header.dump();

    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, header_text.size());
    out += header_text;

    std::uint64_t count = 0;
    for (const auto& l : m.layers) count += l.w.size() + l.b.size();
    put_u64(out, count);
    for (const auto& l : m.layers) {
        for (double v : l.w) put_f64(out, v);
        for (double v : l.b) put_f64(out, v);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + path.string() + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ValidationError("failed writing checkpoint '" + path.string() + "'");
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open checkpoint '" + path.string() + "'");
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    const std::string origin = path.string();
    ByteReader r(data, origin);
    if (r.bytes(4) != std::string(kMagic, 4)) {
        throw ValidationError(origin + ": not a model checkpoint (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw ValidationError(origin + ": unsupported checkpoint version " +
                              std::to_string(version));
    }

    const std::uint64_t header_len = r.u64();
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(r.bytes(header_len));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(origin + ": malformed checkpoint header: " + e.what());
    }

    ModelParams m;
    try {
        for (const auto& jl : header.at("arch").at("layers")) {
            Layer l;
            l.in = jl.at("in").get<std::size_t>();
            l.out = jl.at("out").get<std::size_t>();
            l.act = activation_from_name(jl.at("act").get<std::string>(), origin);
            if (l.in == 0 || l.out == 0) {
                throw ValidationError(origin + ": checkpoint layer has zero dimension");
            }
            l.w.resize(l.in * l.out);
            l.b.resize(l.out);
            m.layers.push_back(std::move(l));
        }
        m.hierarchy_digest = header.at("hierarchy_digest").get<std::string>();
        m.policy_name = header.at("policy").get<std::string>();
        m.seed = header.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(origin + ": incomplete checkpoint header: " + e.what());
    }
    if (m.layers.empty()) throw ValidationError(origin + ": checkpoint describes no layers");

    std::uint64_t expected = 0;
    for (const auto& l : m.layers) expected += l.w.size() + l.b.size();
    const std::uint64_t count = r.u64();
    if (count != expected) {
        throw ValidationError(origin + ": checkpoint holds " + std::to_string(count) +
                              " values, header implies " + std::to_string(expected));
    }
    for (auto& l : m.layers) {
        for (double& v : l.w) v = r.f64();
        for (double& v : l.b) v = r.f64();
    }
    if (!r.exhausted()) throw ValidationError(origin + ": trailing bytes after checkpoint data");
    return m;
}

} // namespace hmlc

#include "rwre/observation_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

std::array<char, 8> encode(double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> out{};
    for (auto& c : out) {
        c = static_cast<char>(bits & 0xFF);
        bits >>= 8;
    }
    return out;
}

double decode(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    return std::bit_cast<double>(bits);
}

std::array<char, 8> encode(std::int64_t v) {
    auto bits = static_cast<std::uint64_t>(v);
    std::array<char, 8> out{};
    for (auto& c : out) {
        c = static_cast<char>(bits & 0xFF);
        bits >>= 8;
    }
    return out;
}

std::int64_t decode_int(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    return static_cast<std::int64_t>(bits);
}

std::ofstream open_out(const std::filesystem::path& path, std::string_view magic) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    return out;
}

// The body after the magic; a multiple of 8 bytes.
std::string read_body(const std::filesystem::path& path, std::string_view magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::array<char, 8> head{};
    in.read(head.data(), head.size());
    if (in.gcount() != 8 || std::string_view(head.data(), 8) != magic)
        throw FormatError(path.string() + ": bad magic bytes");
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (body.size() % 8 != 0) throw FormatError(path.string() + ": truncated file");
    return body;
}

} // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& x) {
    auto out = open_out(path, kTrajectoryMagic);
    for (auto z : x.positions) out.write(encode(z).data(), 8);
    if (!out) throw FormatError("failed writing " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    const auto body = read_body(path, kTrajectoryMagic);
    Trajectory x;
    x.positions.reserve(body.size() / 8);
    for (std::size_t i = 0; i < body.size(); i += 8) x.positions.push_back(decode_int(body.data() + i));
    return x;
}

void write_environment(const std::filesystem::path& path, const EnvironmentWindow& window) {
    auto out = open_out(path, kEnvironmentMagic);
    out.write(encode(std::int64_t{window.first_site}).data(), 8);
    for (double v : window.values) out.write(encode(v).data(), 8);
    if (!out) throw FormatError("failed writing " + path.string());
}

EnvironmentWindow read_environment(const std::filesystem::path& path) {
    const auto body = read_body(path, kEnvironmentMagic);
    if (body.size() < 8) throw FormatError(path.string() + ": truncated file");
    EnvironmentWindow w;
    w.first_site = decode_int(body.data());
    for (std::size_t i = 8; i < body.size(); i += 8) w.values.push_back(decode(body.data() + i));
    return w;
}

void write_observations(std::ostream& out, const ObservationSeq& xs) {
    out.write(kObservationMagic.data(), static_cast<std::streamsize>(kObservationMagic.size()));
    for (double v : xs) {
        const auto bytes = encode(v);
        out.write(bytes.data(), bytes.size());
    }
    if (!out) throw FormatError("failed writing observation stream");
}

ObservationSeq read_observations(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 8 || std::string_view(magic.data(), 8) != kObservationMagic)
        throw FormatError("bad magic bytes: not an RWREOBS1 observation stream");

    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (body.size() % 8 != 0) throw FormatError("truncated observation stream");
    ObservationSeq xs;
    xs.reserve(body.size() / 8);
    for (std::size_t i = 0; i < body.size(); i += 8) xs.push_back(decode(body.data() + i));
    return xs;
}

void write_observations(const std::filesystem::path& path, const ObservationSeq& xs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    write_observations(out, xs);
}

ObservationSeq read_observations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return read_observations(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_observations_text(std::ostream& out, const ObservationSeq& xs) {
    std::array<char, 32> buf{};
    for (double v : xs) {
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out.write(buf.data(), end - buf.data());
        out.put('\n');
    }
}

ObservationSeq read_observations_text(std::istream& in) {
    ObservationSeq xs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{}) throw FormatError("unparsable observation line: " + line);
        xs.push_back(v);
    }
    return xs;
}

} // namespace rwre

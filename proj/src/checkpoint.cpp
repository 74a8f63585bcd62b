#include "qiplane/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qip {

namespace {

constexpr char kMagic[8] = {'Q', 'I', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr const char* kCsvHeader = "qiplane_checkpoint,1";

// Little-endian writers; portable regardless of host endianness.
void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = char((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
    char buf[8];
    in.read(buf, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[i])) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& data,
                     CheckpointFormat format) {
    if (format == CheckpointFormat::Binary) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
        out.write(kMagic, 8);
        write_u64(out, data.size());
        for (const auto& [name, values] : data) {
            write_u64(out, name.size());
            out.write(name.data(), std::streamsize(name.size()));
            write_u64(out, values.size());
            for (double v : values) write_f64(out, v);
        }
    } else {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
        out << kCsvHeader << "\nname,index,value\n";
        out.precision(17);
        for (const auto& [name, values] : data) {
            // Size row first so empty arrays survive the round trip.
            out << name << ",size," << values.size() << '\n';
            for (size_t i = 0; i < values.size(); ++i) {
                out << name << ',' << i << ',' << values[i] << '\n';
            }
        }
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8] = {};
    probe.read(magic, 8);
    if (probe.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0) {
        Checkpoint data;
        const std::uint64_t n_arrays = read_u64(probe);
        for (std::uint64_t a = 0; a < n_arrays; ++a) {
            const std::uint64_t name_len = read_u64(probe);
            std::string name(name_len, '\0');
            probe.read(name.data(), std::streamsize(name_len));
            const std::uint64_t count = read_u64(probe);
            std::vector<double> values(count);
            for (auto& v : values) v = read_f64(probe);
            if (!probe) throw std::runtime_error("truncated checkpoint: " + path);
            data.emplace(std::move(name), std::move(values));
        }
        return data;
    }

    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty checkpoint: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw std::runtime_error("unrecognized checkpoint header in: " + path);
    }
    std::getline(in, line);  // column header
    Checkpoint data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string name, index, value;
        if (!std::getline(ss, name, ',') || !std::getline(ss, index, ',') ||
            !std::getline(ss, value)) {
            throw std::runtime_error("malformed checkpoint row: " + line);
        }
        auto& arr = data[name];
        if (index == "size") {
            arr.reserve(std::stoul(value));
            continue;
        }
        const size_t idx = std::stoul(index);
        if (arr.size() != idx) {
            throw std::runtime_error("non-contiguous checkpoint indices for " + name);
        }
        arr.push_back(std::stod(value));
    }
    return data;
}

}  // namespace qip

#include "nvsgeom/tensor.hpp"

#include "nvsgeom/common.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>

namespace nvs {

namespace {

constexpr char kMagic[4] = {'N', 'V', 'S', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Tensor::Tensor(std::vector<std::uint32_t> shape) : dims(std::move(shape)) {
    data.assign(element_count(dims), 0.0f);
}

std::size_t Tensor::element_count(const std::vector<std::uint32_t>& dims) {
    std::size_t n = 1;
    for (std::uint32_t d : dims) {
        if (d == 0) fail(Status::invalid_argument, "tensor dimension must be positive");
        if (n > std::numeric_limits<std::size_t>::max() / d) {
            fail(Status::invalid_argument, "tensor too large");
        }
        n *= d;
    }
    return n;
}

void Tensor::save(const std::string& path) const {
    if (dims.size() > 255) fail(Status::invalid_argument, "tensor rank exceeds 255");
    if (data.size() != element_count(dims)) {
        fail(Status::invalid_argument, "tensor payload does not match dims");
    }

    std::string header;
    header.append(kMagic, 4);
    put_u16(header, kVersion);
    header.push_back(static_cast<char>(kDtypeF32));
    header.push_back(static_cast<char>(dims.size()));
    for (std::uint32_t d : dims) put_u32(header, d);

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) fail(Status::io_error, "cannot open for writing: " + path);
    if (std::fwrite(header.data(), 1, header.size(), f.get()) != header.size()) {
        fail(Status::io_error, "write failed: " + path);
    }

    static_assert(sizeof(float) == 4);
    if (std::endian::native == std::endian::little) {
        if (!data.empty() &&
            std::fwrite(data.data(), 4, data.size(), f.get()) != data.size()) {
            fail(Status::io_error, "write failed: " + path);
        }
    } else {
        for (float v : data) {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            unsigned char b[4] = {static_cast<unsigned char>(bits & 0xFF),
                                  static_cast<unsigned char>((bits >> 8) & 0xFF),
                                  static_cast<unsigned char>((bits >> 16) & 0xFF),
                                  static_cast<unsigned char>((bits >> 24) & 0xFF)};
            if (std::fwrite(b, 1, 4, f.get()) != 4) fail(Status::io_error, "write failed: " + path);
        }
    }
    if (std::fflush(f.get()) != 0) fail(Status::io_error, "flush failed: " + path);
}

Tensor Tensor::load(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(Status::io_error, "cannot open: " + path);

    unsigned char fixed[8];
    if (std::fread(fixed, 1, 8, f.get()) != 8) fail(Status::parse_error, "truncated header: " + path);
    if (std::memcmp(fixed, kMagic, 4) != 0) fail(Status::parse_error, "bad magic, not a NVST file: " + path);
    if (get_u16(fixed + 4) != kVersion) fail(Status::parse_error, "unsupported NVST version: " + path);
    if (fixed[6] != kDtypeF32) fail(Status::parse_error, "unsupported dtype code: " + path);
    const std::size_t ndim = fixed[7];

    Tensor t;
    t.dims.resize(ndim);
    for (std::size_t i = 0; i < ndim; ++i) {
        unsigned char raw[4];
        if (std::fread(raw, 1, 4, f.get()) != 4) fail(Status::parse_error, "truncated dims: " + path);
        t.dims[i] = get_u32(raw);
    }
    const std::size_t n = element_count(t.dims);
    t.data.resize(n);
    if (std::endian::native == std::endian::little) {
        if (n > 0 && std::fread(t.data.data(), 4, n, f.get()) != n) {
            fail(Status::parse_error, "truncated payload: " + path);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            unsigned char raw[4];
            if (std::fread(raw, 1, 4, f.get()) != 4) fail(Status::parse_error, "truncated payload: " + path);
            std::uint32_t bits = get_u32(raw);
            std::memcpy(&t.data[i], &bits, 4);
        }
    }
    unsigned char extra;
    if (std::fread(&extra, 1, 1, f.get()) == 1) {
        fail(Status::parse_error, "trailing bytes after payload: " + path);
    }
    return t;
}

}  // namespace nvs

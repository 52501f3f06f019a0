#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nvs {

/// Dense row-major f32 tensor plus the NVST container format.
///
/// File layout, all little-endian:
///   bytes 0..3   magic "NVST"
///   bytes 4..5   version, u16 (currently 1)
///   byte  6      dtype code, u8 (1 = f32; the only defined code)
///   byte  7      ndim, u8
///   8 ..         ndim dims, u32 each
///   then         product(dims) f32 values, row-major
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::uint32_t> shape);

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return dims.size(); }

    static std::size_t element_count(const std::vector<std::uint32_t>& dims);

    void save(const std::string& path) const;
    static Tensor load(const std::string& path);
};

}  // namespace nvs

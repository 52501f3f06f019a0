#include "nvsgeom/tensor.hpp"

#include "nvsgeom/common.hpp"
#include "nvsgeom/rng.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace nvs;

TEST_SUITE_BEGIN("tensor");

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("round trip is bit exact for random shapes") {
    Rng rng(95);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t rank = 1 + rng.uniform_below(4);
        std::vector<std::uint32_t> dims;
        for (std::size_t i = 0; i < rank; ++i) {
            dims.push_back(1 + static_cast<std::uint32_t>(rng.uniform_below(7)));
        }
        Tensor t(dims);
        for (float& v : t.data) v = static_cast<float>(rng.uniform(-100, 100));

        const std::string path = temp_path("nvsgeom_tensor_test.nvst");
        t.save(path);
        const Tensor back = Tensor::load(path);
        CHECK(back.dims == t.dims);
        CHECK(back.data == t.data);  // bitwise: same f32 payload
        std::remove(path.c_str());
    }
}

TEST_CASE("header bytes match the frozen layout") {
    Tensor t(std::vector<std::uint32_t>{2, 3});
    for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] = static_cast<float>(i);
    const std::string path = temp_path("nvsgeom_tensor_header.nvst");
    t.save(path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::remove(path.c_str());

    REQUIRE(bytes.size() == 8 + 2 * 4 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "NVST");
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version lo
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);  // version hi
    CHECK(static_cast<unsigned char>(bytes[6]) == 1);  // dtype f32
    CHECK(static_cast<unsigned char>(bytes[7]) == 2);  // ndim
    CHECK(static_cast<unsigned char>(bytes[8]) == 2);  // dim0 = 2 (LE)
    CHECK(static_cast<unsigned char>(bytes[12]) == 3); // dim1 = 3 (LE)
}

TEST_CASE("load rejects corrupted files") {
    const std::string path = temp_path("nvsgeom_tensor_bad.nvst");

    SUBCASE("bad magic") {
        std::ofstream(path, std::ios::binary) << "NOPE1234";
        CHECK_THROWS_AS(Tensor::load(path), Error);
    }
    SUBCASE("truncated payload") {
        Tensor t(std::vector<std::uint32_t>{4, 4});
        t.save(path);
        std::filesystem::resize_file(path, 20);
        CHECK_THROWS_AS(Tensor::load(path), Error);
    }
    SUBCASE("trailing bytes") {
        Tensor t(std::vector<std::uint32_t>{2});
        t.save(path);
        std::ofstream(path, std::ios::binary | std::ios::app) << "x";
        CHECK_THROWS_AS(Tensor::load(path), Error);
    }
    std::remove(path.c_str());
}

TEST_CASE("zero dimensions are rejected") {
    CHECK_THROWS_AS(Tensor(std::vector<std::uint32_t>{3, 0}), Error);
}

TEST_SUITE_END();

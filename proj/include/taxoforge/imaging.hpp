#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace taxoforge {

enum class ImageFormat {
    Jpeg,
    Png,
    GifStatic,
    GifAnimated,
    Bmp,
    Unsupported,
};

// Row-major RGB8.
struct PixelBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t* at(int row, int col) { return pixels.data() + (static_cast<size_t>(row) * width + col) * 3; }
    const std::uint8_t* at(int row, int col) const {
        return pixels.data() + (static_cast<size_t>(row) * width + col) * 3;
    }
};

ImageFormat sniff_format(std::span<const std::uint8_t> data);

// Decode any convertible format to RGB. Throws Unconvertible for animated
// GIF / unsupported data, DecodeError for corrupt bodies.
PixelBuffer decode_image(std::span<const std::uint8_t> data);

std::vector<std::uint8_t> encode_jpeg(const PixelBuffer& img, int quality = 90);

// Downscale by averaging the source block behind each output pixel. Blocks
// follow the same floor partition as average_hash. Requires out <= in dims.
PixelBuffer box_resize(const PixelBuffer& img, int out_w, int out_h);

// Decode, cap the longer side at max_dim (never upscale), re-encode JPEG q90.
std::vector<std::uint8_t> normalize(std::span<const std::uint8_t> data, int max_dim);

// 64-bit average hash: integer luma, 8x8 floor-partition block means,
// bit set where a block mean exceeds the mean of means. Bit 0 is the MSB,
// row-major. Inputs smaller than 8 in either dimension are pixel-replicated.
std::uint64_t average_hash(const PixelBuffer& img);

int hamming(std::uint64_t a, std::uint64_t b);

// Serial reference kernels. The public functions above may run the OpenMP
// variants; these stay single-threaded and are the oracle in tests and the
// baseline in benchmarks. Results are bit-identical by contract.
namespace serial {
std::uint64_t average_hash(const PixelBuffer& img);
PixelBuffer box_resize(const PixelBuffer& img, int out_w, int out_h);
}  // namespace serial

// Internal, exposed for the GIF tests.
int gif_frame_count(std::span<const std::uint8_t> data);
PixelBuffer gif_decode_first(std::span<const std::uint8_t> data);

}  // namespace taxoforge

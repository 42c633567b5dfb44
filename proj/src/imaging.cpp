#include "taxoforge/imaging.hpp"

#include <bit>
#include <cstring>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "taxoforge/errors.hpp"
#include "taxoforge/rounding.hpp"

namespace taxoforge {
namespace {

bool starts_with(std::span<const std::uint8_t> data, std::initializer_list<int> magic) {
    if (data.size() < magic.size()) return false;
    size_t i = 0;
    for (int b : magic)
        if (data[i++] != static_cast<std::uint8_t>(b)) return false;
    return true;
}

std::uint8_t luma(const std::uint8_t* rgb) {
    return static_cast<std::uint8_t>(
        (299 * rgb[0] + 587 * rgb[1] + 114 * rgb[2] + 500) / 1000);
}

// Replicate each pixel r times in both axes.
PixelBuffer replicate(const PixelBuffer& img, int r) {
    PixelBuffer out;
    out.width = img.width * r;
    out.height = img.height * r;
    out.pixels.resize(static_cast<size_t>(out.width) * out.height * 3);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            std::memcpy(out.at(y, x), img.at(y / r, x / r), 3);
    return out;
}

std::uint64_t hash_from_block_means(const std::uint32_t means[64]) {
    std::uint64_t total = 0;
    for (int b = 0; b < 64; ++b) total += means[b];
    const std::uint64_t grand = total / 64;

    std::uint64_t bits = 0;
    for (int b = 0; b < 64; ++b)
        if (means[b] > grand) bits |= 1ULL << (63 - b);
    return bits;
}

void block_mean_one(const PixelBuffer& img, int bi, int bj, std::uint32_t& mean) {
    const int r0 = static_cast<int>(static_cast<std::int64_t>(bi) * img.height / 8);
    const int r1 = static_cast<int>(static_cast<std::int64_t>(bi + 1) * img.height / 8);
    const int c0 = static_cast<int>(static_cast<std::int64_t>(bj) * img.width / 8);
    const int c1 = static_cast<int>(static_cast<std::int64_t>(bj + 1) * img.width / 8);
    std::uint64_t sum = 0;
    for (int y = r0; y < r1; ++y)
        for (int x = c0; x < c1; ++x) sum += luma(img.at(y, x));
    const std::uint64_t area = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
    mean = static_cast<std::uint32_t>(sum / area);
}

void resize_row(const PixelBuffer& img, PixelBuffer& out, int out_w, int out_h, int i) {
    const int r0 = static_cast<int>(static_cast<std::int64_t>(i) * img.height / out_h);
    const int r1 = static_cast<int>(static_cast<std::int64_t>(i + 1) * img.height / out_h);
    for (int j = 0; j < out_w; ++j) {
        const int c0 = static_cast<int>(static_cast<std::int64_t>(j) * img.width / out_w);
        const int c1 = static_cast<int>(static_cast<std::int64_t>(j + 1) * img.width / out_w);
        std::uint64_t sum[3] = {0, 0, 0};
        for (int y = r0; y < r1; ++y)
            for (int x = c0; x < c1; ++x) {
                const std::uint8_t* p = img.at(y, x);
                sum[0] += p[0];
                sum[1] += p[1];
                sum[2] += p[2];
            }
        const std::uint64_t area = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
        std::uint8_t* o = out.at(i, j);
        for (int c = 0; c < 3; ++c)
            o[c] = static_cast<std::uint8_t>((2 * sum[c] + area) / (2 * area));
    }
}

PixelBuffer ensure_min8(const PixelBuffer& img) {
    const int m = std::min(img.width, img.height);
    if (m >= 8) return img;
    return replicate(img, (8 + m - 1) / m);
}

}  // namespace

ImageFormat sniff_format(std::span<const std::uint8_t> data) {
    if (starts_with(data, {0xFF, 0xD8, 0xFF})) return ImageFormat::Jpeg;
    if (starts_with(data, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A}))
        return ImageFormat::Png;
    if (starts_with(data, {'B', 'M'})) return ImageFormat::Bmp;
    if (starts_with(data, {'G', 'I', 'F', '8'})) {
        return gif_frame_count(data) >= 2 ? ImageFormat::GifAnimated
                                          : ImageFormat::GifStatic;
    }
    return ImageFormat::Unsupported;
}

PixelBuffer decode_image(std::span<const std::uint8_t> data) {
    switch (sniff_format(data)) {
        case ImageFormat::GifAnimated:
            throw Unconvertible("animated GIF cannot be converted");
        case ImageFormat::Unsupported:
            throw Unconvertible("unsupported image format");
        case ImageFormat::GifStatic:
            return gif_decode_first(data);
        default:
            break;
    }
    cv::Mat raw(1, static_cast<int>(data.size()), CV_8UC1,
                const_cast<std::uint8_t*>(data.data()));
    cv::Mat bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
    if (bgr.empty()) throw DecodeError("corrupt image body");

    PixelBuffer out;
    out.width = bgr.cols;
    out.height = bgr.rows;
    out.pixels.resize(static_cast<size_t>(out.width) * out.height * 3);
    for (int y = 0; y < out.height; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < out.width; ++x) {
            std::uint8_t* p = out.at(y, x);
            p[0] = row[x][2];
            p[1] = row[x][1];
            p[2] = row[x][0];
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_jpeg(const PixelBuffer& img, int quality) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.at(y, x);
            row[x] = {p[2], p[1], p[0]};
        }
    }
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".jpg", bgr, out, {cv::IMWRITE_JPEG_QUALITY, quality}))
        throw Error("JPEG encode failed");
    return out;
}

namespace serial {

PixelBuffer box_resize(const PixelBuffer& img, int out_w, int out_h) {
    PixelBuffer out;
    out.width = out_w;
    out.height = out_h;
    out.pixels.resize(static_cast<size_t>(out_w) * out_h * 3);
    for (int i = 0; i < out_h; ++i) resize_row(img, out, out_w, out_h, i);
    return out;
}

std::uint64_t average_hash(const PixelBuffer& img) {
    const PixelBuffer src = ensure_min8(img);
    std::uint32_t means[64];
    for (int b = 0; b < 64; ++b) block_mean_one(src, b / 8, b % 8, means[b]);
    return hash_from_block_means(means);
}

}  // namespace serial

PixelBuffer box_resize(const PixelBuffer& img, int out_w, int out_h) {
#ifdef TAXOFORGE_OPENMP
    PixelBuffer out;
    out.width = out_w;
    out.height = out_h;
    out.pixels.resize(static_cast<size_t>(out_w) * out_h * 3);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < out_h; ++i) resize_row(img, out, out_w, out_h, i);
    return out;
#else
    return serial::box_resize(img, out_w, out_h);
#endif
}

std::uint64_t average_hash(const PixelBuffer& img) {
#ifdef TAXOFORGE_OPENMP
    const PixelBuffer src = ensure_min8(img);
    std::uint32_t means[64];
#pragma omp parallel for schedule(static)
    for (int b = 0; b < 64; ++b) block_mean_one(src, b / 8, b % 8, means[b]);
    return hash_from_block_means(means);
#else
    return serial::average_hash(img);
#endif
}

int hamming(std::uint64_t a, std::uint64_t b) {
    return std::popcount(a ^ b);
}

std::vector<std::uint8_t> normalize(std::span<const std::uint8_t> data, int max_dim) {
    PixelBuffer img = decode_image(data);

    const int longest = std::max(img.width, img.height);
    if (longest > max_dim) {
        // dims scale by max_dim/longest, rounded half-up, clamped to >= 1
        auto scaled = [&](int v) {
            const std::int64_t n = 2LL * v * max_dim + longest;
            return std::max<int>(1, static_cast<int>(n / (2LL * longest)));
        };
        img = box_resize(img, scaled(img.width), scaled(img.height));
    }
    return encode_jpeg(img, 90);
}

}  // namespace taxoforge

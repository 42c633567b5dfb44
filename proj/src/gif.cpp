#include <cstring>

#include "taxoforge/errors.hpp"
#include "taxoforge/imaging.hpp"

namespace taxoforge {
namespace {

struct Reader {
    std::span<const std::uint8_t> data;
    size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= data.size()) throw DecodeError("truncated GIF");
        return data[pos++];
    }
    std::uint16_t u16() {
        std::uint16_t lo = u8(), hi = u8();
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    void skip(size_t n) {
        if (pos + n > data.size()) throw DecodeError("truncated GIF");
        pos += n;
    }
    std::span<const std::uint8_t> take(size_t n) {
        if (pos + n > data.size()) throw DecodeError("truncated GIF");
        auto s = data.subspan(pos, n);
        pos += n;
        return s;
    }
};

void skip_sub_blocks(Reader& r) {
    for (;;) {
        std::uint8_t len = r.u8();
        if (len == 0) return;
        r.skip(len);
    }
}

std::vector<std::uint8_t> read_sub_blocks(Reader& r) {
    std::vector<std::uint8_t> out;
    for (;;) {
        std::uint8_t len = r.u8();
        if (len == 0) return out;
        auto s = r.take(len);
        out.insert(out.end(), s.begin(), s.end());
    }
}

// Standard GIF LZW with variable code width (up to 12 bits).
std::vector<std::uint8_t> lzw_decode(std::uint8_t min_code_size,
                                     const std::vector<std::uint8_t>& data,
                                     size_t expected_pixels) {
    if (min_code_size < 2 || min_code_size > 11) throw DecodeError("bad LZW code size");
    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;

    struct Entry {
        std::int16_t prefix;
        std::uint8_t suffix;
        std::uint16_t length;
    };
    std::vector<Entry> table(4096);
    int table_size = 0;
    int code_size = 0;

    auto reset_table = [&] {
        table_size = eoi_code + 1;
        code_size = min_code_size + 1;
        for (int i = 0; i < clear_code; ++i)
            table[i] = {-1, static_cast<std::uint8_t>(i), 1};
    };
    reset_table();

    std::vector<std::uint8_t> out;
    out.reserve(expected_pixels);

    std::uint32_t bits = 0;
    int nbits = 0;
    size_t i = 0;
    int prev = -1;

    auto emit = [&](int code) {
        std::uint8_t stackbuf[4096];
        int n = 0;
        for (int c = code; c >= 0; c = table[c].prefix) stackbuf[n++] = table[c].suffix;
        while (n > 0) out.push_back(stackbuf[--n]);
    };
    auto first_byte = [&](int code) {
        while (table[code].prefix >= 0) code = table[code].prefix;
        return table[code].suffix;
    };

    while (out.size() < expected_pixels) {
        while (nbits < code_size) {
            if (i >= data.size()) return out;  // short streams tolerated
            bits |= static_cast<std::uint32_t>(data[i++]) << nbits;
            nbits += 8;
        }
        int code = static_cast<int>(bits & ((1u << code_size) - 1));
        bits >>= code_size;
        nbits -= code_size;

        if (code == clear_code) {
            reset_table();
            prev = -1;
            continue;
        }
        if (code == eoi_code) break;

        if (prev < 0) {
            if (code >= table_size) throw DecodeError("bad first LZW code");
            emit(code);
            prev = code;
            continue;
        }

        if (code < table_size) {
            emit(code);
            if (table_size < 4096) {
                table[table_size++] = {static_cast<std::int16_t>(prev), first_byte(code),
                                       static_cast<std::uint16_t>(table[prev].length + 1)};
            }
        } else if (code == table_size && table_size < 4096) {
            table[table_size++] = {static_cast<std::int16_t>(prev), first_byte(prev),
                                   static_cast<std::uint16_t>(table[prev].length + 1)};
            emit(code);
        } else {
            throw DecodeError("bad LZW code");
        }
        if (table_size == (1 << code_size) && code_size < 12) ++code_size;
        prev = code;
    }
    return out;
}

struct Palette {
    std::uint8_t rgb[256][3] = {};
    int size = 0;
};

Palette read_palette(Reader& r, int size_field) {
    Palette p;
    p.size = 1 << (size_field + 1);
    auto raw = r.take(static_cast<size_t>(p.size) * 3);
    for (int i = 0; i < p.size; ++i) {
        p.rgb[i][0] = raw[i * 3];
        p.rgb[i][1] = raw[i * 3 + 1];
        p.rgb[i][2] = raw[i * 3 + 2];
    }
    return p;
}

bool parse_header(Reader& r, std::uint16_t& w, std::uint16_t& h, Palette& gct,
                  std::uint8_t& bg) {
    if (r.data.size() < 6) return false;
    if (std::memcmp(r.data.data(), "GIF87a", 6) != 0 &&
        std::memcmp(r.data.data(), "GIF89a", 6) != 0)
        return false;
    r.pos = 6;
    w = r.u16();
    h = r.u16();
    std::uint8_t packed = r.u8();
    bg = r.u8();
    r.u8();  // aspect
    if (packed & 0x80) gct = read_palette(r, packed & 0x07);
    return true;
}

}  // namespace

int gif_frame_count(std::span<const std::uint8_t> data) {
    Reader r{data};
    std::uint16_t w, h;
    Palette gct;
    std::uint8_t bg;
    if (!parse_header(r, w, h, gct, bg)) return 0;

    int frames = 0;
    try {
        for (;;) {
            std::uint8_t block = r.u8();
            if (block == 0x3B) break;
            if (block == 0x21) {
                r.u8();  // label
                skip_sub_blocks(r);
            } else if (block == 0x2C) {
                ++frames;
                r.skip(8);
                std::uint8_t packed = r.u8();
                if (packed & 0x80) r.skip((1u << ((packed & 0x07) + 1)) * 3);
                r.u8();  // LZW min code size
                skip_sub_blocks(r);
            } else {
                break;  // unknown block, stop counting
            }
        }
    } catch (const DecodeError&) {
        // truncated tail; frames seen so far still count
    }
    return frames;
}

PixelBuffer gif_decode_first(std::span<const std::uint8_t> data) {
    Reader r{data};
    std::uint16_t screen_w, screen_h;
    Palette gct;
    std::uint8_t bg = 0;
    if (!parse_header(r, screen_w, screen_h, gct, bg))
        throw DecodeError("not a GIF");
    if (screen_w == 0 || screen_h == 0) throw DecodeError("empty GIF canvas");

    PixelBuffer out;
    out.width = screen_w;
    out.height = screen_h;
    out.pixels.assign(static_cast<size_t>(screen_w) * screen_h * 3, 0);
    if (gct.size > 0 && bg < gct.size) {
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x)
                std::memcpy(out.at(y, x), gct.rgb[bg], 3);
    }

    int transparent = -1;
    for (;;) {
        std::uint8_t block = r.u8();
        if (block == 0x3B) throw DecodeError("GIF has no image data");
        if (block == 0x21) {
            std::uint8_t label = r.u8();
            if (label == 0xF9) {
                // Graphic control extension carries the transparency index.
                std::uint8_t len = r.u8();
                auto gce = r.take(len);
                if (len >= 4 && (gce[0] & 0x01)) transparent = gce[3];
                r.u8();  // terminator
            } else {
                skip_sub_blocks(r);
            }
            continue;
        }
        if (block != 0x2C) throw DecodeError("unexpected GIF block");

        std::uint16_t left = r.u16(), top = r.u16();
        std::uint16_t w = r.u16(), h = r.u16();
        std::uint8_t packed = r.u8();
        Palette lct = gct;
        if (packed & 0x80) lct = read_palette(r, packed & 0x07);
        if (lct.size == 0) throw DecodeError("GIF frame without palette");
        const bool interlaced = packed & 0x40;

        std::uint8_t min_code = r.u8();
        auto compressed = read_sub_blocks(r);
        auto indices = lzw_decode(min_code, compressed, static_cast<size_t>(w) * h);
        if (indices.size() < static_cast<size_t>(w) * h)
            throw DecodeError("incomplete GIF pixel data");

        // Interlace passes: start/step 0/8, 4/8, 2/4, 1/2.
        static const int start[4] = {0, 4, 2, 1};
        static const int step[4] = {8, 8, 4, 2};
        size_t src = 0;
        auto draw_row = [&](int y) {
            for (int x = 0; x < w; ++x, ++src) {
                int idx = indices[src];
                if (idx == transparent || idx >= lct.size) continue;
                int oy = top + y, ox = left + x;
                if (oy >= out.height || ox >= out.width) continue;
                std::memcpy(out.at(oy, ox), lct.rgb[idx], 3);
            }
        };
        if (interlaced) {
            for (int pass = 0; pass < 4; ++pass)
                for (int y = start[pass]; y < h; y += step[pass]) draw_row(y);
        } else {
            for (int y = 0; y < h; ++y) draw_row(y);
        }
        return out;
    }
}

}  // namespace taxoforge

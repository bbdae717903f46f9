#include "attrflow/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace attrflow {

namespace {

struct FileCloser {
    FILE* f;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

}  // namespace

void write_png(const std::string& path, const Image& img) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_png: cannot open " + path);
    FileCloser closer{f};

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("write_png: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng error while writing " + path);
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
                row[static_cast<size_t>(x) * 3 + c] =
                    static_cast<png_byte>(std::lround(255.0f * v));
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_png: cannot open " + path);
    FileCloser closer{f};

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("read_png: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("read_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: libpng error while reading " + path);
    }
    png_init_io(png, f);
    png_read_info(png, info);

    // normalize anything to 8-bit RGB
    png_set_strip_16(png);
    png_set_packing(png);
    png_set_strip_alpha(png);
    const png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    Image img(w, h);
    std::vector<png_byte> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(c, y, x) = static_cast<float>(row[static_cast<size_t>(x) * 3 + c]) / 255.0f;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

Image resize_bilinear(const Image& src, int out_w, int out_h) {
    if (src.width == out_w && src.height == out_h) return src;
    Image dst(out_w, out_h);
    const float sx = static_cast<float>(src.width) / out_w;
    const float sy = static_cast<float>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const float fy = std::max(0.0f, (y + 0.5f) * sy - 0.5f);
        const int y0 = std::min(static_cast<int>(fy), src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const float wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const float fx = std::max(0.0f, (x + 0.5f) * sx - 0.5f);
            const int x0 = std::min(static_cast<int>(fx), src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const float wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const float top = src.at(c, y0, x0) * (1 - wx) + src.at(c, y0, x1) * wx;
                const float bot = src.at(c, y1, x0) * (1 - wx) + src.at(c, y1, x1) * wx;
                dst.at(c, y, x) = top * (1 - wy) + bot * wy;
            }
        }
    }
    return dst;
}

Image tile_grid(const std::vector<Image>& tiles, int cols, int pad) {
    if (tiles.empty()) return Image(1, 1);
    int tw = 0, th = 0;
    for (const auto& t : tiles) {
        tw = std::max(tw, t.width);
        th = std::max(th, t.height);
    }
    const int n = static_cast<int>(tiles.size());
    const int rows = (n + cols - 1) / cols;
    Image grid(cols * (tw + pad) + pad, rows * (th + pad) + pad, 0.25f);
    for (int i = 0; i < n; ++i) {
        const int gx = pad + (i % cols) * (tw + pad);
        const int gy = pad + (i / cols) * (th + pad);
        const Image& t = tiles[static_cast<size_t>(i)];
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < t.height; ++y)
                for (int x = 0; x < t.width; ++x) grid.at(c, gy + y, gx + x) = t.at(c, y, x);
    }
    return grid;
}

}  // namespace attrflow

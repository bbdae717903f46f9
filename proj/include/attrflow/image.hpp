#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrflow/tensor.hpp"

namespace attrflow {

// RGB image, channel-planar float in [0, 1]: pixels[c*h*w + y*w + x].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    Image() = default;
    Image(int w, int h, float fill = 0.0f)
        : width(w), height(h), pixels(static_cast<size_t>(3) * w * h, fill) {}

    float& at(int c, int y, int x) {
        return pixels[(static_cast<size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const {
        return pixels[(static_cast<size_t>(c) * height + y) * width + x];
    }
    size_t size() const { return pixels.size(); }
};

// 8-bit PNG out: value = round(255 * x), clamped. Throws on I/O failure
// with the path in the message.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

Image resize_bilinear(const Image& src, int out_w, int out_h);

// Tile images left to right, top to bottom, with a gray gutter.
Image tile_grid(const std::vector<Image>& tiles, int cols, int pad = 2);

template <typename T>
Tensor<T> image_to_tensor(const Image& img) {
    std::vector<T> data(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) data[i] = static_cast<T>(img.pixels[i]);
    return Tensor<T>::from_data({3, img.height, img.width}, std::move(data));
}

template <typename T>
Image tensor_to_image(const Tensor<T>& t) {
    if (t.shape().size() != 3 || t.dim(0) != 3)
        throw std::invalid_argument("tensor_to_image: expected [3xHxW], got " + shape_str(t.shape()));
    Image img(t.dim(2), t.dim(1));
    for (size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<float>(t.data()[i]);
    return img;
}

}  // namespace attrflow

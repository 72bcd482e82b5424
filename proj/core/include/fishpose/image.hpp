#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fishpose/errors.hpp"

namespace fishpose {

/// Row-major image with 32-bit real samples. 8-bit PNG content maps to the
/// range [0, 255] unchanged.
struct ImageBuffer {
    int width{0};
    int height{0};
    int channels{1};
    std::vector<float> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int c, float fill = 0.0f);

    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    bool sameShape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

/// Grayscale (1ch) or RGB (3ch) 8-bit PNG.
ImageBuffer readPng(const std::string& path);
void writePng(const ImageBuffer& img, const std::string& path);

/// Area-average downsampling by an integer factor. Trailing rows/columns that
/// do not fill a complete cell are dropped.
ImageBuffer downsample(const ImageBuffer& img, int factor);

} // namespace fishpose

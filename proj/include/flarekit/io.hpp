#pragma once

#include "flarekit/image.hpp"

#include <filesystem>

namespace flarekit::io {

/// Reads an 8- or 16-bit PNG. Gray, palette and alpha variants are converted
/// to RGB (alpha dropped); sub-byte depths are widened to 8 bits.
/// Throws IoError if the file cannot be opened, FormatError on bad content.
EncodedImage read_png(const std::filesystem::path& path);

/// Writes RGB at the image's bit depth with fixed encoder settings and no
/// time chunk, so identical images always produce identical bytes.
void write_png(const std::filesystem::path& path, const EncodedImage& img);

/// Little-endian colour PFM ("PF", scale -1.0), rows stored bottom-to-top.
LinearImage read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const LinearImage& img);

/// Dispatches on extension: .pfm is read losslessly, anything else as PNG
/// and gamma-decoded.
LinearImage read_linear(const std::filesystem::path& path, double gamma);

} // namespace flarekit::io

#include "flarekit/io.hpp"

#include "flarekit/color.hpp"
#include "flarekit/errors.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace flarekit::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) {
        throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    }
    return f;
}

// libpng reports errors through longjmp; the message is kept here so it can be
// rethrown as a C++ exception once control is back in a frame we own.
struct PngErrorState {
    std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    if (state) state->message = msg ? msg : "unknown libpng error";
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

} // namespace

EncodedImage read_png(const std::filesystem::path& path) {
    auto file = open_file(path, "rb");

    png_byte signature[8] = {};
    if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
        throw FormatError("'" + path.string() + "' is not a PNG file");
    }

    PngErrorState err;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw FormatError("libpng: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng: cannot create info struct");
    }

    // Everything touched after setjmp that must survive a longjmp lives here.
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int depth = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("'" + path.string() + "': " + err.message);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    if (depth < 8) depth = 8;
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    const std::size_t bytes_per_sample = depth == 16 ? 2 : 1;
    if (rowbytes != static_cast<std::size_t>(width) * 3 * bytes_per_sample) {
        png_error(png, "unexpected row layout after conversion");
    }
    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    std::vector<std::uint16_t> samples(static_cast<std::size_t>(width) * height * 3);
    if (depth == 16) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
        }
    } else {
        std::copy(buffer.begin(), buffer.end(), samples.begin());
    }
    return EncodedImage(static_cast<int>(width), static_cast<int>(height), depth,
                        std::move(samples));
}

void write_png(const std::filesystem::path& path, const EncodedImage& img) {
    if (img.width() <= 0 || img.height() <= 0) {
        throw ParameterError("cannot write an empty PNG");
    }
    const int depth = img.bit_depth();
    const std::size_t bytes_per_sample = depth == 16 ? 2 : 1;
    const std::size_t rowbytes = static_cast<std::size_t>(img.width()) * 3 * bytes_per_sample;

    std::vector<png_byte> buffer(rowbytes * img.height());
    const auto samples = img.samples();
    if (depth == 16) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            buffer[2 * i] = static_cast<png_byte>(samples[i] >> 8);
            buffer[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xff);
        }
    } else {
        std::copy(samples.begin(), samples.end(), buffer.begin());
    }
    std::vector<png_bytep> rows(img.height());
    for (int y = 0; y < img.height(); ++y) rows[y] = buffer.data() + y * rowbytes;

    auto file = open_file(path, "wb");
    PngErrorState err;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw IoError("libpng: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: cannot create info struct");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("'" + path.string() + "': " + err.message);
    }

    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE | PNG_FILTER_SUB | PNG_FILTER_UP | PNG_FILTER_AVG |
                               PNG_FILTER_PAETH);
    png_set_IHDR(png, info, img.width(), img.height(), depth, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);

    if (std::fflush(file.get()) != 0 || std::ferror(file.get())) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

namespace {

std::string read_token(std::istream& in) {
    std::string tok;
    char c = 0;
    while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
    }
    if (!in) return tok;
    tok.push_back(c);
    while (in.get(c) && !std::isspace(static_cast<unsigned char>(c))) tok.push_back(c);
    // The single whitespace byte after the last header token has been consumed.
    return tok;
}

float load_float(const char* bytes, bool little_endian) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes, 4);
    const bool host_little = std::endian::native == std::endian::little;
    if (little_endian != host_little) bits = __builtin_bswap32(bits);
    float v = 0.0f;
    std::memcpy(&v, &bits, 4);
    return v;
}

} // namespace

LinearImage read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    const std::string magic = read_token(in);
    if (magic != "PF") {
        throw FormatError("'" + path.string() + "' is not a colour PFM (magic '" + magic + "')");
    }
    int width = 0;
    int height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(read_token(in));
        height = std::stoi(read_token(in));
        scale = std::stod(read_token(in));
    } catch (const std::exception&) {
        throw FormatError("'" + path.string() + "': malformed PFM header");
    }
    if (width <= 0 || height <= 0 || scale == 0.0) {
        throw FormatError("'" + path.string() + "': invalid PFM header values");
    }
    const bool little = scale < 0.0;

    const std::size_t row_floats = static_cast<std::size_t>(width) * 3;
    std::vector<char> raw(row_floats * height * 4);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw FormatError("'" + path.string() + "': truncated PFM data");
    }

    std::vector<float> data(row_floats * height);
    for (int y = 0; y < height; ++y) {
        const std::size_t src_row = static_cast<std::size_t>(height - 1 - y);
        for (std::size_t i = 0; i < row_floats; ++i) {
            data[y * row_floats + i] = load_float(&raw[(src_row * row_floats + i) * 4], little);
        }
    }
    try {
        return LinearImage(width, height, std::move(data));
    } catch (const ParameterError& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
}

void write_pfm(const std::filesystem::path& path, const LinearImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "PF\n" << img.width() << ' ' << img.height() << "\n-1.0\n";

    const std::size_t row_floats = static_cast<std::size_t>(img.width()) * 3;
    const auto data = img.data();
    std::vector<char> row(row_floats * 4);
    for (int y = img.height() - 1; y >= 0; --y) {
        for (std::size_t i = 0; i < row_floats; ++i) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, &data[y * row_floats + i], 4);
            if constexpr (std::endian::native != std::endian::little) {
                bits = __builtin_bswap32(bits);
            }
            std::memcpy(&row[i * 4], &bits, 4);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LinearImage read_linear(const std::filesystem::path& path, double gamma) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pfm") return read_pfm(path);
    return gamma_decode(read_png(path), gamma);
}

} // namespace flarekit::io

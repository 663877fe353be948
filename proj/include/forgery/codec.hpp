#pragma once

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <jerror.h>
#include <png.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "forgery/error.hpp"
#include "forgery/imaging.hpp"

namespace forgery {

using Bytes = std::vector<std::uint8_t>;

enum class ImageFormat { Jpeg, Png, Tiff, Bmp, Unknown };

inline ImageFormat sniff_format(std::span<const std::uint8_t> bytes) {
    auto starts = [&](std::initializer_list<std::uint8_t> magic) {
        if (bytes.size() < magic.size()) return false;
        return std::equal(magic.begin(), magic.end(), bytes.begin());
    };
    if (starts({0xFF, 0xD8, 0xFF})) return ImageFormat::Jpeg;
    if (starts({0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) return ImageFormat::Png;
    if (starts({'I', 'I', 42, 0}) || starts({'M', 'M', 0, 42})) return ImageFormat::Tiff;
    if (starts({'B', 'M'})) return ImageFormat::Bmp;
    return ImageFormat::Unknown;
}

namespace detail {

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

extern "C" inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

extern "C" inline void jpeg_silent_output(j_common_ptr) {}

// A truncated stream is only a warning to libjpeg; promote it to a hard error.
extern "C" inline void jpeg_emit_message(j_common_ptr cinfo, int level) {
    if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) jpeg_error_exit(cinfo);
}

inline RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.output_message = jpeg_silent_output;
    err.base.emit_message = jpeg_emit_message;

    // Nothing with a destructor may be live across the longjmp, so decode into a raw buffer.
    unsigned char* volatile buffer = nullptr;
    int width = 0, height = 0, channels = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        std::free(buffer);
        throw Error(ErrorCode::CorruptStream, std::string("JPEG decode failed: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    const bool gray = cinfo.num_components == 1;
    if (!gray && cinfo.jpeg_color_space != JCS_YCbCr && cinfo.jpeg_color_space != JCS_RGB) {
        jpeg_destroy_decompress(&cinfo);
        throw Error(ErrorCode::UnsupportedFormat, "JPEG color space other than gray/YCbCr/RGB");
    }
    cinfo.out_color_space = gray ? JCS_GRAYSCALE : JCS_RGB;
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    buffer = static_cast<unsigned char*>(std::malloc(stride * height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = buffer + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    std::vector<std::uint8_t> data(buffer, buffer + stride * height);
    std::free(buffer);
    return RasterImage(width, height, channels, std::move(data));
}

struct PngWriteState {
    std::vector<std::uint8_t>* out;
};

extern "C" inline void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
    state->out->insert(state->out->end(), data, data + length);
}

extern "C" inline void png_flush_noop(png_structp) {}

inline RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw Error(ErrorCode::CorruptStream, std::string("PNG decode failed: ") + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
        std::string message = image.message;
        png_image_free(&image);
        throw Error(ErrorCode::CorruptStream, "PNG decode failed: " + message);
    }
    return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height), channels, std::move(data));
}

// TIFF and BMP are read-only inputs; OpenCV's codecs cover their many variants.
inline RasterImage decode_with_opencv(std::span<const std::uint8_t> bytes) {
    cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    cv::Mat mat;
    try {
        mat = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::CorruptStream, std::string("decode failed: ") + e.what());
    }
    if (mat.empty()) throw Error(ErrorCode::CorruptStream, "TIFF/BMP stream could not be decoded");
    if (mat.depth() != CV_8U) throw Error(ErrorCode::UnsupportedFormat, "only 8-bit rasters are supported");
    const int ch = mat.channels();
    if (ch != 1 && ch != 3 && ch != 4) throw Error(ErrorCode::UnsupportedFormat, "unsupported channel count");
    const int out_ch = ch == 1 ? 1 : 3;
    RasterImage out(mat.cols, mat.rows, out_ch);
    for (int y = 0; y < mat.rows; ++y) {
        const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < mat.cols; ++x) {
            if (ch == 1) {
                out.at(x, y) = row[x];
            } else {
                // OpenCV stores BGR(A)
                out.at(x, y, 0) = row[x * ch + 2];
                out.at(x, y, 1) = row[x * ch + 1];
                out.at(x, y, 2) = row[x * ch + 0];
            }
        }
    }
    return out;
}

}  // namespace detail

/// Decodes a JPEG, PNG, TIFF or BMP stream. Color sources give 3 channels, grayscale sources 1.
inline RasterImage decode_image(std::span<const std::uint8_t> bytes) {
    switch (sniff_format(bytes)) {
        case ImageFormat::Jpeg: return detail::decode_jpeg(bytes);
        case ImageFormat::Png: return detail::decode_png(bytes);
        case ImageFormat::Tiff:
        case ImageFormat::Bmp: return detail::decode_with_opencv(bytes);
        case ImageFormat::Unknown: break;
    }
    throw Error(ErrorCode::UnsupportedFormat, "stream is not JPEG, PNG, TIFF or BMP");
}

enum class ChromaSubsampling { None444, Half420 };

/// Baseline JPEG using the standard quality-scaled quantization tables.
/// Color images are written without chroma subsampling (4:4:4) unless 4:2:0 is requested.
inline Bytes encode_jpeg(const RasterImage& img, JpegQuality quality,
                         ChromaSubsampling subsampling = ChromaSubsampling::None444) {
    if (img.empty()) throw Error(ErrorCode::EncodeFailure, "cannot encode an empty raster");
    if (img.width() > JPEG_MAX_DIMENSION || img.height() > JPEG_MAX_DIMENSION)
        throw Error(ErrorCode::EncodeFailure, "raster exceeds JPEG dimension limit");

    jpeg_compress_struct cinfo{};
    detail::JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = detail::jpeg_error_exit;
    err.base.output_message = detail::jpeg_silent_output;

    unsigned char* buffer = nullptr;
    unsigned long length = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw Error(ErrorCode::EncodeFailure, std::string("JPEG encode failed: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &length);
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = img.channels();
    cinfo.in_color_space = img.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality.value(), TRUE);
    cinfo.dct_method = JDCT_ISLOW;
    for (int c = 0; c < cinfo.num_components; ++c) {
        const int factor = c == 0 && subsampling == ChromaSubsampling::Half420 ? 2 : 1;
        cinfo.comp_info[c].h_samp_factor = factor;
        cinfo.comp_info[c].v_samp_factor = factor;
    }
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
    auto* base = const_cast<std::uint8_t*>(img.data().data());
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = base + stride * cinfo.next_scanline;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    Bytes out(buffer, buffer + length);
    std::free(buffer);
    return out;
}

namespace detail {

inline std::size_t png_row_bytes(const RasterImage& img, bool one_bit) {
    const auto w = static_cast<std::size_t>(img.width());
    return one_bit ? (w + 7) / 8 : w * static_cast<std::size_t>(img.channels());
}

// Runs after setjmp; keeping the row loop in its own frame leaves nothing for longjmp to clobber.
inline void png_write_rows(png_structp png, png_infop info, const RasterImage& img, bool one_bit, png_bytep row) {
    const int w = img.width(), h = img.height(), ch = img.channels();
    const std::size_t row_bytes = png_row_bytes(img, one_bit);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), one_bit ? 1 : 8,
                 ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::uint8_t* src = img.data().data();
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* line = src + static_cast<std::size_t>(y) * w * ch;
        if (one_bit) {
            std::fill(row, row + row_bytes, 0);
            for (int x = 0; x < w; ++x)
                if (line[x] > 127) row[x / 8] |= static_cast<png_byte>(0x80u >> (x % 8));
        } else {
            std::copy(line, line + row_bytes, row);
        }
        png_write_row(png, row);
    }
}

}  // namespace detail

/// Lossless PNG. `one_bit` writes a 1-bit grayscale image where samples > 127 become white.
inline Bytes encode_png(const RasterImage& img, bool one_bit = false) {
    if (one_bit && img.channels() != 1) throw Error(ErrorCode::EncodeFailure, "1-bit PNG requires one channel");
    Bytes out;
    detail::PngWriteState state{&out};
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::EncodeFailure, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::EncodeFailure, "png_create_info_struct failed");
    }

    const std::size_t row_bytes = detail::png_row_bytes(img, one_bit);
    auto* row = static_cast<png_bytep>(std::malloc(row_bytes));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::free(row);
        throw Error(ErrorCode::EncodeFailure, "PNG encode failed");
    }
    png_set_write_fn(png, &state, detail::png_write_to_vector, detail::png_flush_noop);
    detail::png_write_rows(png, info, img, one_bit, row);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::free(row);
    return out;
}

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline RasterImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

}  // namespace forgery

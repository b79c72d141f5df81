#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <fpe/errors.hpp>

namespace fpe::io {

// --- IDX (big-endian) --------------------------------------------------------

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels; // count * rows * cols, row-major

    std::span<const std::uint8_t> sample(std::size_t index) const {
        const std::size_t stride = rows * cols;
        return {pixels.data() + index * stride, stride};
    }
};

struct IdxLabels {
    std::vector<std::uint8_t> labels;
};

namespace detail {

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("failed reading '" + path.string() + "'");
    return bytes;
}

inline std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                                 const std::string& what) {
    if (offset + 4 > bytes.size())
        throw FormatError("truncated IDX file while reading " + what);
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

} // namespace detail

inline IdxImages load_idx_images(const std::filesystem::path& path) {
    auto bytes = detail::read_all(path);
    if (detail::read_u32_be(bytes, 0, "magic") != kIdxImagesMagic)
        throw FormatError("'" + path.string() + "' is not an IDX image file (bad magic)");
    IdxImages images;
    images.count = detail::read_u32_be(bytes, 4, "count");
    images.rows = detail::read_u32_be(bytes, 8, "rows");
    images.cols = detail::read_u32_be(bytes, 12, "cols");
    if (images.rows == 0 || images.cols == 0 ||
        images.count > bytes.size() / (images.rows * images.cols) + 1)
        throw FormatError("implausible IDX image header in '" + path.string() + "'");
    const std::size_t expected = images.count * images.rows * images.cols;
    if (bytes.size() != 16 + expected)
        throw FormatError("truncated IDX image file '" + path.string() + "'");
    images.pixels.assign(bytes.begin() + 16, bytes.end());
    return images;
}

inline IdxLabels load_idx_labels(const std::filesystem::path& path) {
    auto bytes = detail::read_all(path);
    if (detail::read_u32_be(bytes, 0, "magic") != kIdxLabelsMagic)
        throw FormatError("'" + path.string() + "' is not an IDX label file (bad magic)");
    const std::size_t count = detail::read_u32_be(bytes, 4, "count");
    if (bytes.size() != 8 + count)
        throw FormatError("truncated IDX label file '" + path.string() + "'");
    IdxLabels labels;
    labels.labels.assign(bytes.begin() + 8, bytes.end());
    return labels;
}

// --- PGM (binary, maxval 255) --------------------------------------------------

inline void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      std::span<const std::uint8_t> pixels) {
    if (pixels.size() != width * height)
        throw DimensionError("pgm write: pixel count does not match width*height");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
};

inline PgmImage read_pgm(const std::filesystem::path& path) {
    auto bytes = detail::read_all(path);
    std::size_t pos = 0;
    auto token = [&]() -> std::string {
        while (pos < bytes.size() &&
               (bytes[pos] == ' ' || bytes[pos] == '\n' || bytes[pos] == '\r' ||
                bytes[pos] == '\t'))
            ++pos;
        std::string out;
        while (pos < bytes.size() && bytes[pos] > ' ')
            out += static_cast<char>(bytes[pos++]);
        if (out.empty())
            throw FormatError("truncated PGM header in '" + path.string() + "'");
        return out;
    };
    if (token() != "P5")
        throw FormatError("'" + path.string() + "' is not a binary PGM (expected P5)");
    PgmImage img;
    try {
        img.width = std::stoul(token());
        img.height = std::stoul(token());
        if (std::stoul(token()) != 255)
            throw FormatError("'" + path.string() + "' must use maxval 255");
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception&) {
        throw FormatError("malformed PGM header in '" + path.string() + "'");
    }
    ++pos; // single whitespace byte after maxval
    if (pos > bytes.size() || bytes.size() - pos != img.width * img.height)
        throw FormatError("truncated PGM payload in '" + path.string() + "'");
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return img;
}

} // namespace fpe::io

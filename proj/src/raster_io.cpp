#include "gad/raster_io.hpp"

#include <png.h>

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <csetjmp>
#include <fstream>
#include <iterator>
#include <memory>
#include <vector>

#include "gad/errors.hpp"

namespace gad::io {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Cursor over an in-memory header that reports byte offsets on failure.
class HeaderReader {
public:
  HeaderReader(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string token(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what, start);
    return {bytes_.begin() + static_cast<std::ptrdiff_t>(start),
            bytes_.begin() + static_cast<std::ptrdiff_t>(pos_)};
  }

  long positive_int(const char* what) {
    const std::size_t start = (skip_space_and_comments(), pos_);
    const std::string t = token(what);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0' || v <= 0)
      fail(std::string("invalid ") + what + " '" + t + "'", start);
    return v;
  }

  double real(const char* what) {
    const std::size_t start = (skip_space_and_comments(), pos_);
    const std::string t = token(what);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || !std::isfinite(v))
      fail(std::string("invalid ") + what + " '" + t + "'", start);
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      fail("expected a whitespace byte before the raster data", pos_);
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    throw FormatError(path_.string() + ": " + msg, offset);
  }

private:
  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

MultiChannelField read_pfm(const std::vector<unsigned char>& bytes, const fs::path& path) {
  HeaderReader hdr(bytes, path);
  const std::string magic = hdr.token("PFM magic");
  int channels = 0;
  if (magic == "PF")
    channels = 3;
  else if (magic == "Pf")
    channels = 1;
  else
    hdr.fail("unknown PFM magic '" + magic + "'", 0);
  const long width = hdr.positive_int("width");
  const long height = hdr.positive_int("height");
  const std::size_t scale_at = (hdr.skip_space_and_comments(), hdr.pos());
  const double scale = hdr.real("scale");
  if (scale == 0.0) hdr.fail("scale must be non-zero", scale_at);
  hdr.single_whitespace();
  const bool little = scale < 0.0;

  const std::size_t data_at = hdr.pos();
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - data_at < count * 4)
    hdr.fail("truncated raster data: need " + std::to_string(count * 4) + " bytes, have " +
                 std::to_string(bytes.size() - data_at),
             bytes.size());

  std::vector<ScalarField> planes(channels, ScalarField(static_cast<int>(height),
                                                        static_cast<int>(width)));
  std::size_t off = data_at;
  for (long file_row = 0; file_row < height; ++file_row) {
    const int r = static_cast<int>(height - 1 - file_row);
    for (long c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch) {
        std::array<unsigned char, 4> b;
        std::memcpy(b.data(), bytes.data() + off, 4);
        if (little != (std::endian::native == std::endian::little)) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
        const float v = std::bit_cast<float>(b);
        if (!std::isfinite(v)) hdr.fail("non-finite sample", off);
        planes[ch](r, static_cast<int>(c)) = v;
        off += 4;
      }
  }
  return MultiChannelField(std::move(planes));
}

MultiChannelField read_pnm(const std::vector<unsigned char>& bytes, const fs::path& path) {
  HeaderReader hdr(bytes, path);
  const std::string magic = hdr.token("PNM magic");
  int channels = 0;
  bool ascii = false;
  if (magic == "P5" || magic == "P2")
    channels = 1;
  else if (magic == "P6" || magic == "P3")
    channels = 3;
  else
    hdr.fail("unsupported PNM magic '" + magic + "'", 0);
  ascii = magic == "P2" || magic == "P3";
  const long width = hdr.positive_int("width");
  const long height = hdr.positive_int("height");
  const std::size_t maxval_at = (hdr.skip_space_and_comments(), hdr.pos());
  const long maxval = hdr.positive_int("maxval");
  if (maxval > 65535) hdr.fail("maxval above 65535", maxval_at);

  std::vector<ScalarField> planes(channels, ScalarField(static_cast<int>(height),
                                                        static_cast<int>(width)));
  const double maxv = static_cast<double>(maxval);
  if (ascii) {
    for (long r = 0; r < height; ++r)
      for (long c = 0; c < width; ++c)
        for (int ch = 0; ch < channels; ++ch) {
          const std::size_t at = (hdr.skip_space_and_comments(), hdr.pos());
          const std::string t = hdr.token("sample");
          char* end = nullptr;
          const long v = std::strtol(t.c_str(), &end, 10);
          if (*end != '\0' || v < 0 || v > maxval) hdr.fail("invalid sample '" + t + "'", at);
          planes[ch](static_cast<int>(r), static_cast<int>(c)) = v / maxv;
        }
    return MultiChannelField(std::move(planes));
  }

  hdr.single_whitespace();
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t data_at = hdr.pos();
  const std::size_t need = static_cast<std::size_t>(width) * height * channels * bps;
  if (bytes.size() - data_at < need)
    hdr.fail("truncated raster data: need " + std::to_string(need) + " bytes", bytes.size());
  std::size_t off = data_at;
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch) {
        long v = bytes[off];
        if (bps == 2) v = (v << 8) | bytes[off + 1];
        if (v > maxval) hdr.fail("sample above maxval", off);
        planes[ch](static_cast<int>(r), static_cast<int>(c)) = v / maxv;
        off += bps;
      }
  return MultiChannelField(std::move(planes));
}

// --- PNG -------------------------------------------------------------------

struct PngDecoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // after alpha stripping
  int bit_depth = 8;
  std::vector<unsigned char> pixels;
};

struct PngErrorState {
  std::jmp_buf jump;
  char message[256] = {0};
  std::vector<png_bytep> rows;
};

void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

struct MemoryReader {
  const std::vector<unsigned char>* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->bytes->data() + r->pos, len);
  r->pos += len;
}

// All libpng calls live here; no object with a destructor is created
// between setjmp and a possible longjmp.
bool decode_png(MemoryReader& reader, PngDecoded& out, PngErrorState& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_to_state,
                                           png_warning_ignore);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(err.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, png_read_from_memory);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.pixels.resize(rowbytes * out.height);
  err.rows.resize(out.height);
  for (int r = 0; r < out.height; ++r) err.rows[r] = out.pixels.data() + rowbytes * r;
  png_read_image(png, err.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

PngDecoded load_png(const std::vector<unsigned char>& bytes, const fs::path& path) {
  PngDecoded d;
  auto err = std::make_unique<PngErrorState>();
  MemoryReader reader{&bytes, 0};
  if (!decode_png(reader, d, *err))
    throw FormatError(path.string() + ": " +
                          (err->message[0] ? err->message : "libpng initialisation failed"),
                      reader.pos);
  return d;
}

MultiChannelField read_png(const std::vector<unsigned char>& bytes, const fs::path& path) {
  const PngDecoded d = load_png(bytes, path);
  std::vector<ScalarField> planes(d.channels, ScalarField(d.height, d.width));
  const std::size_t bps = d.bit_depth == 16 ? 2 : 1;
  const double maxv = d.bit_depth == 16 ? 65535.0 : 255.0;
  std::size_t off = 0;
  for (int r = 0; r < d.height; ++r)
    for (int c = 0; c < d.width; ++c)
      for (int ch = 0; ch < d.channels; ++ch) {
        unsigned v = d.pixels[off];
        if (bps == 2) v = (v << 8) | d.pixels[off + 1];
        planes[ch](r, c) = v / maxv;
        off += bps;
      }
  return MultiChannelField(std::move(planes));
}

void write_png_bytes(const fs::path& path, int width, int height, int channels,
                     const std::vector<unsigned char>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write '" + path.string() + "': " + msg);
  }
}

std::uint8_t to_byte(double v) {
  const double s = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(s);
}

}  // namespace

RasterFormat sniff_format(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  unsigned char m[8] = {0};
  in.read(reinterpret_cast<char*>(m), 8);
  const auto got = in.gcount();
  if (got >= 8 && png_sig_cmp(m, 0, 8) == 0) return RasterFormat::Png;
  if (got >= 2 && m[0] == 'P' && (m[1] == 'F' || m[1] == 'f')) return RasterFormat::Pfm;
  if (got >= 2 && m[0] == 'P' && (m[1] == '2' || m[1] == '3' || m[1] == '5' || m[1] == '6'))
    return RasterFormat::Pnm;
  throw FormatError(path.string() + ": unrecognised raster format", 0);
}

MultiChannelField read_field(const fs::path& path) {
  const RasterFormat fmt = sniff_format(path);
  const auto bytes = slurp(path);
  switch (fmt) {
    case RasterFormat::Pfm:
      return read_pfm(bytes, path);
    case RasterFormat::Png:
      return read_png(bytes, path);
    case RasterFormat::Pnm:
      return read_pnm(bytes, path);
  }
  throw FormatError(path.string() + ": unrecognised raster format", 0);
}

MultiChannelField read_stacked(std::span<const fs::path> paths) {
  if (paths.empty()) throw InvalidArgument("no input rasters given");
  std::vector<ScalarField> planes;
  int h = -1;
  int w = -1;
  for (const auto& p : paths) {
    MultiChannelField f = read_field(p);
    if (h < 0) {
      h = f.height();
      w = f.width();
    } else if (f.height() != h || f.width() != w) {
      throw ShapeError("'" + p.string() + "' is " + std::to_string(f.height()) + "x" +
                       std::to_string(f.width()) + ", expected " + std::to_string(h) + "x" +
                       std::to_string(w));
    }
    for (auto& plane : f.planes()) planes.push_back(std::move(plane));
  }
  return MultiChannelField(std::move(planes));
}

LabelMap read_labels(const fs::path& path, int num_classes, int ignore_id) {
  const RasterFormat fmt = sniff_format(path);
  const auto bytes = slurp(path);
  if (fmt == RasterFormat::Png) {
    const PngDecoded d = load_png(bytes, path);
    if (d.channels != 1 || d.bit_depth != 8)
      throw FormatError(path.string() + ": label maps must be single-channel 8-bit", 0);
    return LabelMap(d.height, d.width, d.pixels, num_classes, ignore_id);
  }
  if (fmt == RasterFormat::Pnm) {
    const MultiChannelField f = read_pnm(bytes, path);
    if (f.channels() != 1) throw FormatError(path.string() + ": label maps must be single-channel", 0);
    std::vector<std::uint8_t> ids(f[0].size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      ids[i] = static_cast<std::uint8_t>(std::lround(f[0].values()[i] * 255.0));
    return LabelMap(f.height(), f.width(), std::move(ids), num_classes, ignore_id);
  }
  throw FormatError(path.string() + ": label maps must be PNG or PGM", 0);
}

void write_pfm(const MultiChannelField& field, const fs::path& path) {
  if (field.channels() != 1 && field.channels() != 3)
    throw InvalidArgument("PFM holds 1 or 3 channels, got " + std::to_string(field.channels()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const int w = field.width();
  const int h = field.height();
  out << (field.channels() == 3 ? "PF" : "Pf") << '\n' << w << ' ' << h << '\n' << "-1.0" << '\n';

  std::vector<unsigned char> row(static_cast<std::size_t>(w) * field.channels() * 4);
  for (int r = h - 1; r >= 0; --r) {
    std::size_t off = 0;
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < field.channels(); ++ch) {
        auto b = std::bit_cast<std::array<unsigned char, 4>>(static_cast<float>(field[ch](r, c)));
        if constexpr (std::endian::native == std::endian::big) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
        std::memcpy(row.data() + off, b.data(), 4);
        off += 4;
      }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

void write_png(const MultiChannelField& field, const fs::path& path) {
  if (field.channels() != 1 && field.channels() != 3)
    throw InvalidArgument("PNG output holds 1 or 3 channels, got " + std::to_string(field.channels()));
  const int nch = field.channels();
  std::vector<unsigned char> pixels(static_cast<std::size_t>(field.width()) * field.height() * nch);
  std::size_t off = 0;
  for (int r = 0; r < field.height(); ++r)
    for (int c = 0; c < field.width(); ++c)
      for (int ch = 0; ch < nch; ++ch) pixels[off++] = to_byte(field[ch](r, c));
  write_png_bytes(path, field.width(), field.height(), nch, pixels);
}

void write_labels(const LabelMap& labels, const fs::path& path) {
  const auto ids = labels.ids();
  write_png_bytes(path, labels.width(), labels.height(), 1,
                  std::vector<unsigned char>(ids.begin(), ids.end()));
}

void write_field(const MultiChannelField& field, const fs::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".pfm")
    write_pfm(field, path);
  else if (ext == ".png")
    write_png(field, path);
  else
    throw InvalidArgument("unsupported output extension '" + ext + "' (use .pfm or .png)");
}

}  // namespace gad::io

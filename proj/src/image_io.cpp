#include "rrseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "rrseg/error.hpp"

namespace rrseg {

namespace {

[[noreturn]] void decode_error(const std::string& path, const std::string& what) {
  fail(ErrorCode::Decode, path + ": " + what);
}

std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, path + ": cannot open for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

class PnmParser {
 public:
  PnmParser(const std::vector<std::uint8_t>& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  // Reads one ASCII header integer, skipping whitespace and # comments.
  long next_int() {
    for (;;) {
      while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) decode_error(path_, "expected an integer in PNM data");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) decode_error(path_, "PNM integer out of range");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary samples.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) decode_error(path_, "malformed PNM header");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

std::uint8_t rescale(long v, long maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

Image read_pnm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  const char kind = static_cast<char>(bytes[1]);
  const bool binary = kind == '5' || kind == '6';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  PnmParser p(bytes, path);
  const long width = p.next_int();
  const long height = p.next_int();
  const long maxval = p.next_int();
  if (width < 1 || height < 1 || width > 65535 || height > 65535) decode_error(path, "unsupported PNM dimensions");
  if (maxval < 1 || maxval > 65535) decode_error(path, "PNM maxval out of range");

  Image img(static_cast<int>(width), static_cast<int>(height), channels);
  const std::size_t samples = img.data.size();
  if (binary) {
    p.skip_single_space();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() - p.pos() < samples * bytes_per) decode_error(path, "truncated PNM raster");
    const std::uint8_t* src = bytes.data() + p.pos();
    for (std::size_t i = 0; i < samples; ++i) {
      const long v = bytes_per == 2 ? (static_cast<long>(src[2 * i]) << 8) | src[2 * i + 1] : src[i];
      if (v > maxval) decode_error(path, "PNM sample exceeds maxval");
      img.data[i] = rescale(v, maxval);
    }
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      const long v = p.next_int();
      if (v > maxval) decode_error(path, "PNM sample exceeds maxval");
      img.data[i] = rescale(v, maxval);
    }
  }
  return img;
}

struct PngReadState {
  const std::vector<std::uint8_t>* bytes;
  std::size_t offset;
};

void png_read_bytes(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->bytes->size() - state->offset < length) png_error(png, "truncated PNG stream");
  std::copy_n(state->bytes->data() + state->offset, length, out);
  state->offset += length;
}

void png_raise(png_structp png, png_const_charp message) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = message;
  png_longjmp(png, 1);
}

class PngReader {
 public:
  PngReader(const std::vector<std::uint8_t>& bytes, const std::string& path) : state_{&bytes, 0}, path_(path) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message_, png_raise, nullptr);
    if (png_) info_ = png_create_info_struct(png_);
    if (!png_ || !info_) decode_error(path_, "cannot allocate PNG decoder");
    png_set_read_fn(png_, &state_, png_read_bytes);
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  // Returns false on a libpng error; the message is in error().
  bool read_header(int& width, int& height, int& channels) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_read_info(png_, info_);
    png_set_strip_16(png_);
    png_set_strip_alpha(png_);
    png_set_packing(png_);
    png_set_palette_to_rgb(png_);
    png_set_expand_gray_1_2_4_to_8(png_);
    png_read_update_info(png_, info_);
    width = static_cast<int>(png_get_image_width(png_, info_));
    height = static_cast<int>(png_get_image_height(png_, info_));
    channels = png_get_channels(png_, info_);
    return true;
  }

  bool read_rows(png_bytep* rows) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_read_image(png_, rows);
    png_read_end(png_, nullptr);
    return true;
  }

  const std::string& error() const { return message_; }

 private:
  PngReadState state_;
  const std::string& path_;
  std::string message_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

Image read_png(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  PngReader reader(bytes, path);
  int width = 0;
  int height = 0;
  int channels = 0;
  if (!reader.read_header(width, height, channels)) decode_error(path, "PNG decode failed: " + reader.error());
  if (channels != 1 && channels != 3) decode_error(path, "unsupported PNG channel layout");
  Image img(width, height, channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    rows[static_cast<std::size_t>(r)] = img.data.data() + static_cast<std::size_t>(r) * width * channels;
  }
  if (!reader.read_rows(rows.data())) decode_error(path, "PNG decode failed: " + reader.error());
  return img;
}

}  // namespace

Image read_image(const std::string& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return read_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
    return read_pnm(bytes, path);
  }
  decode_error(path, "unrecognized image format (expected PGM, PPM or PNG)");
}

void write_pnm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, path + ": cannot open for writing");
  out << (image.channels == 1 ? "P5" : "P6") << '\n' << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
  if (!out) fail(ErrorCode::Io, path + ": write failed");
}

void write_pgm(const std::string& path, const GrayImage& image) { write_pnm(path, to_image(image)); }

void write_mask(const std::string& path, const SegMask& mask) {
  GrayImage gray(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) gray.pixels[i] = mask.bits[i] ? 255 : 0;
  write_pgm(path, gray);
}

SegMask read_mask(const std::string& path) {
  const GrayImage gray = to_luma(read_image(path));
  SegMask mask(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) mask.bits[i] = gray.pixels[i] ? 1 : 0;
  return mask;
}

}  // namespace rrseg

#include "wcpd/image.hpp"

#include "wcpd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace wcpd {

ImageGrid::ImageGrid(Index side, Vec values)
  : n(side)
  , pixels(std::move(values))
{
  if (side < 1 || pixels.size() != side * side) {
    throw std::invalid_argument("ImageGrid: expected " + std::to_string(side * side) + " pixels");
  }
}

namespace {

class HeaderReader
{
public:
  explicit HeaderReader(std::string const &bytes) : s_(bytes) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments()
  {
    while (pos_ < s_.size()) {
      auto const c = static_cast<unsigned char>(s_[pos_]);
      if (std::isspace(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') { ++pos_; }
      } else {
        break;
      }
    }
  }

  long number(char const *what)
  {
    skip_space_and_comments();
    std::size_t const start = pos_;
    long value = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      value = value * 10 + (s_[pos_] - '0');
      if (value > 1'000'000'000L) { throw ImageFormatError(std::string("PGM: ") + what + " too large", start); }
      ++pos_;
    }
    if (pos_ == start) { throw ImageFormatError(std::string("PGM: expected ") + what, start); }
    return value;
  }

  /// Consumes the single whitespace byte separating the header from raster data.
  void single_space()
  {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      throw ImageFormatError("PGM: expected whitespace after maxval", pos_);
    }
    ++pos_;
  }

private:
  std::string const &s_;
  std::size_t pos_ = 0;
};

} // namespace

ImageGrid parse_pgm(std::string const &bytes)
{
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ImageFormatError("PGM: magic number must be P2 or P5", 0);
  }
  bool const binary = bytes[1] == '5';
  // Blank the magic so header offsets refer to the original bytes.
  std::string shadow = bytes;
  shadow[0] = ' ';
  shadow[1] = ' ';
  HeaderReader r(shadow);
  long const width = r.number("width");
  long const height = r.number("height");
  std::size_t const maxval_at = r.pos();
  long const maxval = r.number("maxval");
  if (width < 1 || height < 1) { throw ImageFormatError("PGM: empty image", maxval_at); }
  if (width != height) {
    throw ImageFormatError("PGM: image must be square, got " + std::to_string(width) + "x" + std::to_string(height),
                           maxval_at);
  }
  if (maxval < 1 || maxval > 65535) { throw ImageFormatError("PGM: maxval out of range", maxval_at); }

  auto const count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  Vec pixels(static_cast<Index>(count));
  double const scale = 1.0 / static_cast<double>(maxval);
  if (binary) {
    r.single_space();
    std::size_t const bpp = maxval > 255 ? 2 : 1;
    std::size_t const start = r.pos();
    if (shadow.size() < start + count * bpp) {
      throw ImageFormatError("PGM: truncated raster, expected " + std::to_string(count * bpp) + " bytes",
                             shadow.size());
    }
    for (std::size_t k = 0; k < count; ++k) {
      std::size_t const at = start + k * bpp;
      long v = static_cast<unsigned char>(shadow[at]);
      if (bpp == 2) { v = (v << 8) | static_cast<unsigned char>(shadow[at + 1]); }
      if (v > maxval) { throw ImageFormatError("PGM: sample exceeds maxval", at); }
      pixels[static_cast<Index>(k)] = static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      r.skip_space_and_comments();
      std::size_t const at = r.pos();
      long const v = r.number("sample");
      if (v > maxval) { throw ImageFormatError("PGM: sample exceeds maxval", at); }
      pixels[static_cast<Index>(k)] = static_cast<double>(v) * scale;
    }
  }
  ImageGrid img(static_cast<Index>(width), std::move(pixels));
  img.maxval = static_cast<int>(maxval);
  return img;
}

ImageGrid read_pgm(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot open " + path.string()); }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

std::string format_pgm(ImageGrid const &img, PgmFormat format)
{
  if (img.maxval < 1 || img.maxval > 65535) { throw std::invalid_argument("format_pgm: maxval out of range"); }
  std::ostringstream out;
  out << (format == PgmFormat::Binary ? "P5" : "P2") << '\n' << img.n << ' ' << img.n << '\n' << img.maxval << '\n';
  auto quantize = [&](double v) {
    double const c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
    return static_cast<long>(std::lround(c * img.maxval));
  };
  if (format == PgmFormat::Binary) {
    for (Index k = 0; k < img.pixels.size(); ++k) {
      long const q = quantize(img.pixels[k]);
      if (img.maxval > 255) { out.put(static_cast<char>((q >> 8) & 0xff)); }
      out.put(static_cast<char>(q & 0xff));
    }
  } else {
    for (Index i = 0; i < img.n; ++i) {
      for (Index j = 0; j < img.n; ++j) {
        out << quantize(img.pixels[i * img.n + j]) << (j + 1 < img.n ? ' ' : '\n');
      }
    }
  }
  return out.str();
}

void write_pgm(std::filesystem::path const &path, ImageGrid const &img, PgmFormat format)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  out << format_pgm(img, format);
  if (!out) { throw IoError("write failed for " + path.string()); }
}

ImageGrid phantom(Index n)
{
  if (n < 4) { throw std::invalid_argument("phantom: side must be at least 4"); }
  Vec px(n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double const u = static_cast<double>(i) / n;
      double const v = static_cast<double>(j) / n;
      double value = 0.2;
      if (u >= 0.15 && u < 0.55 && v >= 0.12 && v < 0.45) { value = 0.85; }
      double const di = (static_cast<double>(i) - 0.62 * n) / n;
      double const dj = (static_cast<double>(j) - 0.6 * n) / n;
      if (di * di + dj * dj < 0.22 * 0.22) { value = 0.55; }
      if (v >= 0.78 && v < 0.86 && u >= 0.1 && u < 0.9) { value = 1.0; }
      px[i * n + j] = value;
    }
  }
  return ImageGrid(n, std::move(px));
}

double psnr(ImageGrid const &ref, ImageGrid const &test)
{
  if (ref.n != test.n || ref.pixels.size() != test.pixels.size()) {
    throw std::invalid_argument("psnr: size mismatch");
  }
  double const mse = (ref.pixels - test.pixels).squaredNorm() / static_cast<double>(ref.pixels.size());
  if (mse <= 0.0) { return kPsnrCap; }
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

} // namespace wcpd

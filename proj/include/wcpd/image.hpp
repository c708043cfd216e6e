#pragma once

#include "wcpd/operators.hpp"

#include <filesystem>
#include <string>

namespace wcpd {

/// Square grayscale image, row-major, intensities nominally in [0, 1].
struct ImageGrid
{
  Index n = 0;
  Vec pixels;
  int maxval = 255; ///< quantization of the source file, reused on save

  ImageGrid() = default;
  ImageGrid(Index side, Vec values);

  double operator()(Index i, Index j) const { return pixels[i * n + j]; }
};

enum class PgmFormat
{
  Ascii,  // P2
  Binary, // P5
};

/// Reads P2 or P5 with maxval up to 65535, rescaled to [0, 1]. Non-square
/// images and malformed headers raise ImageFormatError.
ImageGrid read_pgm(std::filesystem::path const &path);
ImageGrid parse_pgm(std::string const &bytes);

/// Writes the image clamped to [0, 1] and quantized to img.maxval.
void write_pgm(std::filesystem::path const &path, ImageGrid const &img, PgmFormat format = PgmFormat::Binary);
std::string format_pgm(ImageGrid const &img, PgmFormat format = PgmFormat::Binary);

/// Piecewise-constant test image: background, a bright rectangle, a darker
/// disc and a thin bar.
ImageGrid phantom(Index n);

/// 10 log10(1 / MSE), capped at 99 dB for identical images.
double psnr(ImageGrid const &ref, ImageGrid const &test);

inline constexpr double kPsnrCap = 99.0;

} // namespace wcpd

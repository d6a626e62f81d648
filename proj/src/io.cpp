#include "depthup/io.hpp"

#include "depthup/log.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace depthup::io {
namespace {

constexpr Index kMaxPixels = Index(1) << 28;

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return e;
}

void check_dims(long long w, long long h, const fs::path& path) {
  if (w < 1 || h < 1) throw FormatError(path.string() + ": invalid dimensions");
  if (w > kMaxPixels / h) throw FormatError(path.string() + ": dimensions overflow");
}

// --- PNG ----------------------------------------------------------------------

struct PngImage {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 8;  // 8 or 16
  int channels = 1;
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels

  std::uint16_t at(png_uint_32 r, png_uint_32 c, int ch) const {
    return samples[(static_cast<size_t>(r) * width + c) * static_cast<size_t>(channels) +
                   static_cast<size_t>(ch)];
  }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_throw(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  *err = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

// Only trivially destructible state lives between setjmp and the libpng
// calls; buffers are sized before the jump point.
PngImage read_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw FormatError("cannot open " + path.string());
  std::array<unsigned char, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_throw, png_warn);
  if (png == nullptr) throw std::bad_alloc();
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::bad_alloc();
  }

  PngImage img;
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_set_expand(png);  // palette -> RGB, low-bit gray -> 8-bit, tRNS -> alpha
  png_read_update_info(png, info);

  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  if (static_cast<long long>(img.width) * img.height > kMaxPixels) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": dimensions overflow");
  }
  const size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * img.height);
  rows.resize(img.height);
  for (png_uint_32 r = 0; r < img.height; ++r) rows[r] = raw.data() + r * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const size_t count = static_cast<size_t>(img.width) * img.height * static_cast<size_t>(img.channels);
  img.samples.resize(count);
  for (png_uint_32 r = 0; r < img.height; ++r) {
    const unsigned char* row = rows[r];
    for (size_t k = 0; k < static_cast<size_t>(img.width) * static_cast<size_t>(img.channels); ++k) {
      img.samples[r * static_cast<size_t>(img.width) * static_cast<size_t>(img.channels) + k] =
          img.bit_depth == 16 ? static_cast<std::uint16_t>((row[2 * k] << 8) | row[2 * k + 1])
                              : row[k];
    }
  }
  return img;
}

void write_png(const fs::path& path, const PngImage& img) {
  const int color_type = img.channels == 1   ? PNG_COLOR_TYPE_GRAY
                         : img.channels == 3 ? PNG_COLOR_TYPE_RGB
                                             : PNG_COLOR_TYPE_RGBA;
  const size_t stride = static_cast<size_t>(img.width) * static_cast<size_t>(img.channels) *
                        (img.bit_depth == 16 ? 2 : 1);
  std::vector<unsigned char> raw(stride * img.height);
  for (size_t i = 0; i < img.samples.size(); ++i) {
    if (img.bit_depth == 16) {
      raw[2 * i] = static_cast<unsigned char>(img.samples[i] >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(img.samples[i] & 0xff);
    } else {
      raw[i] = static_cast<unsigned char>(img.samples[i]);
    }
  }
  std::vector<png_bytep> rows(img.height);
  for (png_uint_32 r = 0; r < img.height; ++r) rows[r] = raw.data() + r * stride;

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw FormatError("cannot write " + path.string());
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_throw, png_warn);
  if (png == nullptr) throw std::bad_alloc();
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw std::bad_alloc();
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width, img.height, img.bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PngImage gray_png(const Eigen::MatrixXd& values, int bit_depth, double scale) {
  PngImage img;
  img.width = static_cast<png_uint_32>(values.cols());
  img.height = static_cast<png_uint_32>(values.rows());
  img.bit_depth = bit_depth;
  img.channels = 1;
  img.samples.resize(static_cast<size_t>(values.size()));
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      const double v = std::round(values(r, c) * scale);
      img.samples[static_cast<size_t>(r * values.cols() + c)] =
          static_cast<std::uint16_t>(std::clamp(v, 0.0, top));
    }
  }
  return img;
}

// Rec. 601 luma of an 8/16-bit image, scaled to [0, 1].
Eigen::MatrixXd luma(const PngImage& img) {
  const double top = img.bit_depth == 16 ? 65535.0 : 255.0;
  Eigen::MatrixXd out(img.height, img.width);
  for (png_uint_32 r = 0; r < img.height; ++r) {
    for (png_uint_32 c = 0; c < img.width; ++c) {
      double v;
      if (img.channels >= 3) {
        v = 0.299 * img.at(r, c, 0) + 0.587 * img.at(r, c, 1) + 0.114 * img.at(r, c, 2);
      } else {
        v = img.at(r, c, 0);
      }
      out(r, c) = std::clamp(v / top, 0.0, 1.0);
    }
  }
  return out;
}

std::array<unsigned char, 3> hue_to_rgb(double hue_deg) {
  const double h = hue_deg / 60.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  if (h < 1) { r = 1; g = x; }
  else if (h < 2) { r = x; g = 1; }
  else if (h < 3) { g = 1; b = x; }
  else if (h < 4) { g = x; b = 1; }
  else if (h < 5) { r = x; b = 1; }
  else { r = 1; b = x; }
  auto q = [](double v) { return static_cast<unsigned char>(std::lround(v * 255.0)); };
  return {q(r), q(g), q(b)};
}

}  // namespace

// --- PFM ------------------------------------------------------------------------

Eigen::MatrixXd read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string magic;
  long long width = 0, height = 0;
  double scale = 0.0;
  if (!(in >> magic) || magic != "Pf") throw FormatError(path.string() + ": expected grayscale PFM header 'Pf'");
  if (!(in >> width >> height >> scale) || scale == 0.0) throw FormatError(path.string() + ": malformed PFM header");
  check_dims(width, height, path);
  in.get();  // single whitespace byte before the raster

  const bool little = scale < 0.0;
  std::vector<std::uint32_t> raw(static_cast<size_t>(width * height));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * 4)) {
    throw FormatError(path.string() + ": truncated PFM raster");
  }
  const bool swap = little != (std::endian::native == std::endian::little);
  Eigen::MatrixXd out(height, width);
  // Rows are stored bottom to top.
  for (long long r = 0; r < height; ++r) {
    for (long long c = 0; c < width; ++c) {
      std::uint32_t bits = raw[static_cast<size_t>((height - 1 - r) * width + c)];
      if (swap) bits = __builtin_bswap32(bits);
      out(r, c) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return out;
}

void write_pfm(const fs::path& path, const Eigen::MatrixXd& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "Pf\n" << values.cols() << ' ' << values.rows() << "\n-1.0\n";
  std::vector<std::uint32_t> raw(static_cast<size_t>(values.size()));
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(values(r, c)));
      if constexpr (std::endian::native != std::endian::little) bits = __builtin_bswap32(bits);
      raw[static_cast<size_t>((values.rows() - 1 - r) * values.cols() + c)] = bits;
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw FormatError("write failed: " + path.string());
}

// --- depth ------------------------------------------------------------------------

DepthPng read_depth_png(const fs::path& path) {
  const PngImage img = read_png(path);
  if (img.channels != 1 || img.bit_depth != 16) {
    throw FormatError(path.string() + ": depth PNG must be 16-bit grayscale");
  }
  Eigen::MatrixXd depth(img.height, img.width);
  EvalMask valid(img.height, img.width);
  for (png_uint_32 r = 0; r < img.height; ++r) {
    for (png_uint_32 c = 0; c < img.width; ++c) {
      const std::uint16_t s = img.at(r, c, 0);
      depth(r, c) = s / kDepthPngScale;
      valid(r, c) = s != 0;
    }
  }
  return {DepthGrid(std::move(depth)), std::move(valid)};
}

void write_depth_png(const fs::path& path, const DepthGrid& depth) {
  const double limit = 65535.0 / kDepthPngScale;
  if (depth.values().maxCoeff() > limit) {
    throw FormatError(path.string() + ": depth exceeds the 16-bit range (" + std::to_string(limit) + " m)");
  }
  if (depth.values().minCoeff() < 0.0) log::warn(path.string() + ": negative depths stored as invalid (0)");
  write_png(path, gray_png(depth.values(), 16, kDepthPngScale));
}

DepthGrid read_depth(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return DepthGrid(read_pfm(path));
  if (ext == ".png") return read_depth_png(path).depth;
  throw FormatError(path.string() + ": unsupported depth format (use .pfm or .png)");
}

void write_depth(const fs::path& path, const DepthGrid& depth) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return write_pfm(path, depth.values());
  if (ext == ".png") return write_depth_png(path, depth);
  throw FormatError(path.string() + ": unsupported depth format (use .pfm or .png)");
}

IntensityGrid read_intensity(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return IntensityGrid(read_pfm(path).cwiseMax(0.0).cwiseMin(1.0));
  if (ext == ".png") return IntensityGrid(luma(read_png(path)));
  throw FormatError(path.string() + ": unsupported intensity format (use .pfm or .png)");
}

void write_intensity(const fs::path& path, const IntensityGrid& image) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return write_pfm(path, image.values());
  if (ext == ".png") return write_png(path, gray_png(image.values(), 8, 255.0));
  throw FormatError(path.string() + ": unsupported intensity format (use .pfm or .png)");
}

void write_mask_png(const fs::path& path, const Mask& mask) {
  write_png(path, gray_png(mask.cast<double>().matrix(), 8, 255.0));
}

Mask read_mask_png(const fs::path& path) {
  const PngImage img = read_png(path);
  Mask m(img.height, img.width);
  for (png_uint_32 r = 0; r < img.height; ++r) {
    for (png_uint_32 c = 0; c < img.width; ++c) m(r, c) = img.at(r, c, 0) != 0;
  }
  return m;
}

// --- sparse -------------------------------------------------------------------------

SparseDepth parse_sparse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  long long rows = -1, cols = -1;
  Mask mask;
  Eigen::MatrixXd values;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (rows < 0) {
      if (!(fields >> rows >> cols)) throw FormatError("sparse: malformed header on line " + std::to_string(line_no));
      check_dims(cols, rows, "sparse header");
      check_shape({rows, cols});
      mask = Mask::Constant(rows, cols, false);
      values = Eigen::MatrixXd::Zero(rows, cols);
      continue;
    }
    long long r = 0, c = 0;
    double d = 0.0;
    std::string extra;
    if (!(fields >> r >> c >> d) || (fields >> extra)) {
      throw FormatError("sparse: malformed record on line " + std::to_string(line_no));
    }
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw FormatError("sparse: coordinates (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") out of bounds on line " + std::to_string(line_no));
    }
    if (mask(r, c)) {
      log::warn("sparse: duplicate sample at (" + std::to_string(r) + ", " + std::to_string(c) +
                "), keeping line " + std::to_string(line_no));
    }
    mask(r, c) = true;
    values(r, c) = d;
  }
  if (rows < 0) throw FormatError("sparse: missing header");
  try {
    return {std::move(mask), std::move(values)};
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("sparse: ") + e.what());
  }
}

std::string format_sparse(const SparseDepth& samples) {
  std::string out = "# row col depth_m\n" + std::to_string(samples.rows()) + " " +
                    std::to_string(samples.cols()) + "\n";
  std::array<char, 64> buf{};
  // Row-major record order reads naturally next to image viewers.
  for (Index r = 0; r < samples.rows(); ++r) {
    for (Index c = 0; c < samples.cols(); ++c) {
      if (!samples.mask()(r, c)) continue;
      std::snprintf(buf.data(), buf.size(), "%lld %lld %.6g\n", static_cast<long long>(r),
                    static_cast<long long>(c), samples.values()(r, c));
      out += buf.data();
    }
  }
  return out;
}

SparseDepth read_sparse(const fs::path& path) {
  if (lower_ext(path) == ".png") {
    DepthPng png = read_depth_png(path);
    return {std::move(png.valid), png.depth.values()};
  }
  return parse_sparse(read_text(path));
}

void write_sparse(const fs::path& path, const SparseDepth& samples) {
  if (lower_ext(path) == ".png") {
    return write_depth_png(path, DepthGrid(samples.values()));
  }
  write_text(path, format_sparse(samples));
}

// --- prior -------------------------------------------------------------------------

void write_prior(const fs::path& dir, const InformingPrior& prior) {
  fs::create_directories(dir);
  write_pfm(dir / "prior_row.pfm", prior.jump_row);
  write_pfm(dir / "prior_col.pfm", prior.jump_col);
}

InformingPrior read_prior(const fs::path& dir) {
  InformingPrior p{read_pfm(dir / "prior_row.pfm"), read_pfm(dir / "prior_col.pfm")};
  check_same_shape(shape_of(p.jump_row), shape_of(p.jump_col), "read_prior");
  return p;
}

// --- colour export -------------------------------------------------------------------

std::vector<unsigned char> colorize(const DepthGrid& depth) {
  const Eigen::MatrixXd& v = depth.values();
  double min_pos = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) > 0.0) min_pos = std::min(min_pos, v(i));
  }
  if (!std::isfinite(min_pos)) throw std::invalid_argument("export_colorized: no positive depths");
  if (v.minCoeff() <= 0.0) log::warn("export_colorized: non-positive depths clamped to " + std::to_string(min_pos));

  const Eigen::ArrayXXd logd = v.array().max(min_pos).log();
  const double lo = logd.minCoeff(), hi = logd.maxCoeff();
  const double span = hi - lo;
  std::vector<unsigned char> rgb(static_cast<size_t>(v.size()) * 3);
  for (Index r = 0; r < v.rows(); ++r) {
    for (Index c = 0; c < v.cols(); ++c) {
      const double t = span > 0.0 ? (logd(r, c) - lo) / span : 0.0;
      const auto px = hue_to_rgb(240.0 * t);
      std::copy(px.begin(), px.end(), rgb.begin() + (r * v.cols() + c) * 3);
    }
  }
  return rgb;
}

void export_colorized(const DepthGrid& depth, const fs::path& path) {
  const std::vector<unsigned char> rgb = colorize(depth);
  PngImage img;
  img.width = static_cast<png_uint_32>(depth.cols());
  img.height = static_cast<png_uint_32>(depth.rows());
  img.bit_depth = 8;
  img.channels = 3;
  img.samples.assign(rgb.begin(), rgb.end());
  write_png(path, img);
}

// --- frames ---------------------------------------------------------------------------

FrameBundle read_frame(const fs::path& dir) {
  auto find = [&](const char* stem, std::initializer_list<const char*> exts) -> std::optional<fs::path> {
    for (const char* e : exts) {
      fs::path p = dir / (std::string(stem) + e);
      if (fs::exists(p)) return p;
    }
    return std::nullopt;
  };
  const auto intensity_path = find("intensity", {".pfm", ".png"});
  const auto sparse_path = find("sparse", {".txt", ".png"});
  if (!intensity_path) throw FormatError(dir.string() + ": missing intensity.pfm/.png");
  if (!sparse_path) throw FormatError(dir.string() + ": missing sparse.txt/.png");

  std::string id = dir.filename().string();
  if (id.empty() || id == ".") id = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  FrameBundle frame{id, read_intensity(*intensity_path), read_sparse(*sparse_path), std::nullopt, std::nullopt};
  check_same_shape(frame.intensity.shape(), frame.sparse.shape(), "frame");
  if (const auto truth_path = find("truth", {".pfm", ".png"})) {
    DepthGrid truth = read_depth(*truth_path);
    check_same_shape(frame.intensity.shape(), truth.shape(), "frame truth");
    frame.eval_mask = valid_truth_mask(truth);
    frame.truth = std::move(truth);
  }
  return frame;
}

// --- JSON / text ------------------------------------------------------------------------

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json residuals = nlohmann::json::object();
  for (int i = 0; i < kConstraintCount; ++i) residuals[kConstraintNames[i]] = report.constraint_residuals[i];
  return {{"iterations", report.iterations},
          {"converged", report.converged},
          {"primal_residual", report.primal_residual},
          {"dual_residual", report.dual_residual},
          {"constraint_residuals", residuals},
          {"final_objective", report.final_objective()},
          {"objective_trace", report.objective_trace}};
}

nlohmann::json to_json(const ErrorMetrics& metrics) {
  return {{"mae", metrics.mae}, {"rmse", metrics.rmse}, {"n_pixels", metrics.pixels}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace depthup::io

#pragma once
// File formats. Binary data travels in a self-describing container: magic +
// version + named tensor records (dtype tag, rank, dims, little-endian
// payload) and a trailing CRC32 over the whole stream. Text outputs are CSV
// (numbers in shortest round-trip decimal form) and 8-bit PGM/PNG images.

#include <cstdint>
#include <string>
#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/recon.hpp"
#include "dynrad/trajectory.hpp"

namespace dynrad::io {

enum class DType : uint8_t { f32 = 0, f64 = 1, c64 = 2, c128 = 3 };
size_t dtype_size(DType d);

struct Tensor {
  std::string name;
  DType dtype = DType::f64;
  std::vector<uint64_t> dims;
  std::vector<uint8_t> data;

  size_t n_elems() const;

  static Tensor from_f32(const std::string& name, std::vector<uint64_t> dims,
                         const float* v);
  static Tensor from_f64(const std::string& name, std::vector<uint64_t> dims,
                         const double* v);
  static Tensor from_c128(const std::string& name, std::vector<uint64_t> dims,
                          const cplx* v);
  std::vector<float> as_f32() const;
  std::vector<double> as_f64() const;
  std::vector<cplx> as_c128() const;
};

struct Container {
  std::vector<Tensor> tensors;

  bool has(const std::string& name) const;
  const Tensor& get(const std::string& name) const;
  void add(Tensor t) { tensors.push_back(std::move(t)); }
};

std::vector<uint8_t> serialize_container(const Container& c);
Container parse_container(const std::vector<uint8_t>& bytes);
void write_container(const std::string& path, const Container& c);
Container read_container(const std::string& path);

// --- raw file helpers ---
void write_file(const std::string& path, const void* data, size_t n);
std::vector<uint8_t> read_file(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Shortest decimal form that parses back to the identical double.
std::string fmt_double(double v);

// --- domain objects ---
void save_spokes(const std::string& path, const traj::SpokeSet& set,
                 const phantom::CoilMaps& coils);
struct LoadedSpokes {
  traj::SpokeSet set;
  phantom::CoilMaps coils;
};
LoadedSpokes load_spokes(const std::string& path);

void save_dynamic(const std::string& path, const DynamicImage& dyn);
DynamicImage load_dynamic(const std::string& path);

template <typename Real>
void save_checkpoint(const std::string& path, const recon::Model<Real>& model);
struct LoadedModel {
  recon::Precision precision = recon::Precision::f64;
  recon::Model<double> m64;
  recon::Model<float> m32;
};
LoadedModel load_checkpoint(const std::string& path);

// --- image / table export ---
// mag is [nx*ny] (index ix*ny+iy); raster row iy, column ix, 8-bit window
// [lo, hi] -> [0, 255].
void write_pgm(const std::string& path, const std::vector<double>& mag, int nx, int ny,
               double lo, double hi);
struct PgmImage {
  int nx = 0, ny = 0;
  std::vector<uint8_t> bytes;  // raster order (row iy, column ix)
};
PgmImage read_pgm(const std::string& path);

void write_png(const std::string& path, const std::vector<double>& mag, int nx, int ny,
               double lo, double hi);
PgmImage read_png(const std::string& path);  // grayscale 8-bit, filter 0 only

std::string csv_matrix(const std::vector<double>& vals, size_t rows, size_t cols);
std::vector<std::vector<double>> parse_csv_matrix(const std::string& text);

std::string train_log_csv(const recon::TrainLog& log);

}  // namespace dynrad::io

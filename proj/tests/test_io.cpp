#include <unistd.h>
#include <zlib.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "dynrad/config.hpp"
#include "dynrad/io.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/recon.hpp"
#include "dynrad/trajectory.hpp"

using namespace dynrad;
using namespace dynrad::io;

namespace {

std::string tmp_path(const std::string& name) {
  return "/tmp/dynrad_iotest_" + std::to_string(getpid()) + "_" + name;
}

// rewrite the trailing CRC so only the intended corruption is visible
void fix_crc(std::vector<uint8_t>& b) {
  uint32_t c = (uint32_t)crc32(crc32(0L, Z_NULL, 0), b.data(), (uInt)(b.size() - 4));
  std::memcpy(b.data() + b.size() - 4, &c, 4);
}

Container sample_container() {
  Container c;
  const double a[6] = {1.0 / 3, -0.0, 1e300, 5e-324, 0.1, -7.25};
  c.add(Tensor::from_f64("a", {2, 3}, a));
  const float b[4] = {1.5f, -2.25f, 3e-8f, 1e30f};
  c.add(Tensor::from_f32("b", {4}, b));
  const cplx z[2] = {cplx(1.0 / 3, -2.0), cplx(0.0, 1e-12)};
  c.add(Tensor::from_c128("z", {2}, z));
  const double s = 42.5;
  c.add(Tensor::from_f64("scalar", {}, &s));  // rank 0 = one element
  c.add(Tensor::from_f64("empty", {0}, &s));  // zero elements, pointer unused
  return c;
}

}  // namespace

TEST_CASE("container: serialize/parse round trip preserves every byte") {
  Container c = sample_container();
  auto bytes = serialize_container(c);
  Container d = parse_container(bytes);
  REQUIRE(d.tensors.size() == c.tensors.size());
  for (size_t i = 0; i < c.tensors.size(); ++i) {
    const Tensor &t = c.tensors[i], &u = d.tensors[i];
    CHECK(u.name == t.name);
    CHECK(u.dtype == t.dtype);
    CHECK(u.dims == t.dims);
    REQUIRE(u.data.size() == t.data.size());
    CHECK(std::memcmp(u.data.data(), t.data.data(), t.data.size()) == 0);
  }
  CHECK(d.has("a"));
  CHECK(!d.has("nope"));
  CHECK_THROWS_AS(d.get("nope"), ConfigError);
  CHECK_THROWS_AS(d.get("b").as_f64(), ConfigError);  // dtype mismatch
  CHECK(d.get("scalar").n_elems() == 1u);
  CHECK(d.get("scalar").as_f64()[0] == 42.5);
  CHECK(d.get("empty").n_elems() == 0u);
  // -0.0 and the denormal survive
  auto av = d.get("a").as_f64();
  CHECK(std::signbit(av[1]));
  CHECK(av[3] == 5e-324);
}

TEST_CASE("container: corruption and malformed streams are rejected") {
  auto good = serialize_container(sample_container());

  auto flipped = good;
  flipped[flipped.size() / 2] ^= 0xFF;
  CHECK_THROWS_WITH_AS(parse_container(flipped),
                       "container: checksum mismatch (corrupt file)", ConfigError);

  auto cut = good;
  cut.resize(cut.size() - 5);
  CHECK_THROWS_AS(parse_container(cut), ConfigError);

  std::vector<uint8_t> shorty = {1, 2, 3};
  CHECK_THROWS_WITH_AS(parse_container(shorty), "container: file too short", ConfigError);

  auto badmagic = good;
  badmagic[0] = 'X';
  fix_crc(badmagic);
  CHECK_THROWS_WITH_AS(parse_container(badmagic), "container: bad magic bytes", ConfigError);

  auto badver = good;
  badver[4] = 9;
  fix_crc(badver);
  CHECK_THROWS_WITH_AS(parse_container(badver), "container: unsupported format version",
                       ConfigError);

  // single tensor named "x": dtype byte sits after 4+4+4 header, u16 name
  // length, 1 name byte and the 4 record magic bytes
  Container one;
  const double v = 1.0;
  one.add(Tensor::from_f64("x", {1}, &v));
  auto baddt = serialize_container(one);
  REQUIRE(baddt[19] == 1);  // f64 tag
  baddt[19] = 7;
  fix_crc(baddt);
  CHECK_THROWS_WITH_AS(parse_container(baddt), "container: unknown dtype tag", ConfigError);

  auto trailing = serialize_container(one);
  trailing.resize(trailing.size() - 4);
  trailing.push_back(0);
  trailing.insert(trailing.end(), {0, 0, 0, 0});
  fix_crc(trailing);
  CHECK_THROWS_WITH_AS(parse_container(trailing), "container: trailing bytes", ConfigError);
}

TEST_CASE("raw file and text helpers") {
  const std::string p = tmp_path("text.bin");
  std::string payload("line1\n\0mid\nline2", 16);
  write_text(p, payload);
  CHECK(read_text(p) == payload);
  auto bytes = read_file(p);
  CHECK(bytes.size() == payload.size());
  CHECK_THROWS_AS(read_file(tmp_path("does_not_exist")), ConfigError);
  CHECK_THROWS_AS(write_text("/nonexistent_dir_zz/f.txt", "x"), ConfigError);
  std::remove(p.c_str());
}

TEST_CASE("shortest round-trip decimal formatting") {
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(1.0 / 3) == "0.3333333333333333");
  CHECK(fmt_double(-0.0) == "-0");
  CHECK(fmt_double(42.0) == "42");
  CHECK(fmt_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(fmt_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(fmt_double(std::nan("")) == "nan");
}

TEST_CASE("csv matrix round trip, including inf and tiny magnitudes") {
  std::vector<double> vals = {1.5, -0.25, 0.1,
                              2e-17, std::numeric_limits<double>::infinity(), 42.0};
  std::string text = csv_matrix(vals, 2, 3);
  CHECK(text == "1.5,-0.25,0.1\n2e-17,inf,42\n");
  auto rows = parse_csv_matrix(text);
  REQUIRE(rows.size() == 2u);
  REQUIRE(rows[0].size() == 3u);
  for (size_t r = 0; r < 2; ++r)
    for (size_t c = 0; c < 3; ++c) CHECK(rows[r][c] == vals[r * 3 + c]);

  CHECK_THROWS_AS(csv_matrix(vals, 2, 2), ConfigError);
  CHECK_THROWS_AS(parse_csv_matrix("1,2\n3,x\n"), ConfigError);
  auto ragged = parse_csv_matrix("1,2\n\n3\n");
  REQUIRE(ragged.size() == 2u);
  CHECK(ragged[0].size() == 2u);
  CHECK(ragged[1].size() == 1u);
}

TEST_CASE("spoke sets round trip with coil models") {
  traj::SpokeSet set;
  set.geo = traj::golden_angle_geometry(5, 8, 256.0, 0.0023, 23.62814);
  set.tr = 0.0023;
  set.fov = 256.0;
  const int N = 5, nc = 2, M = 8;
  set.samples.assign(N, std::vector<std::vector<cplx>>(nc, std::vector<cplx>(M)));
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < nc; ++c)
      for (int m = 0; m < M; ++m)
        set.samples[i][c][m] = cplx(i + 0.25 * m, c - 0.5 * m);
  phantom::CoilMaps coils = phantom::make_coil_maps(nc, GridSpec{16, 16, 256.0}, 9);

  const std::string p = tmp_path("spokes.bin");
  save_spokes(p, set, coils);
  LoadedSpokes back = load_spokes(p);
  CHECK(back.set.fov == set.fov);
  CHECK(back.set.tr == set.tr);
  REQUIRE(back.set.n_spokes() == N);
  REQUIRE(back.set.n_coils() == nc);
  REQUIRE(back.set.M() == M);
  for (int i = 0; i < N; ++i) {
    CHECK(back.set.geo[i].index == set.geo[i].index);
    CHECK(back.set.geo[i].angle_deg == set.geo[i].angle_deg);
    CHECK(back.set.geo[i].t == set.geo[i].t);
    CHECK(back.set.geo[i].dk == set.geo[i].dk);
    for (int c = 0; c < nc; ++c)
      for (int m = 0; m < M; ++m) CHECK(back.set.samples[i][c][m] == set.samples[i][c][m]);
  }
  REQUIRE(back.coils.n_coils() == nc);
  for (int j = 0; j < nc; ++j) {
    CHECK(back.coils.gain[j] == coils.gain[j]);
    CHECK(back.coils.mu_x[j] == coils.mu_x[j]);
    CHECK(back.coils.mu_y[j] == coils.mu_y[j]);
    CHECK(back.coils.tau[j] == coils.tau[j]);
    CHECK(back.coils.uniform[j] == coils.uniform[j]);
  }
  std::remove(p.c_str());

  traj::SpokeSet empty;
  CHECK_THROWS_AS(save_spokes(tmp_path("x"), empty, coils), ConfigError);
  phantom::CoilMaps three = phantom::make_coil_maps(3, GridSpec{16, 16, 256.0}, 9);
  CHECK_THROWS_AS(save_spokes(tmp_path("x"), set, three), ConfigError);
}

TEST_CASE("dynamic images round trip exactly") {
  DynamicImage dyn;
  dyn.grid = GridSpec{8, 8, 256.0};
  dyn.times = {0.0, 0.125};
  for (int f = 0; f < 2; ++f) {
    ComplexImage img(dyn.grid);
    for (size_t p = 0; p < img.v.size(); ++p) img.v[p] = cplx(0.5 * p + f, -double(p));
    dyn.frames.push_back(img);
  }
  const std::string p = tmp_path("dyn.bin");
  save_dynamic(p, dyn);
  DynamicImage back = load_dynamic(p);
  CHECK(back.grid.nx == 8);
  CHECK(back.grid.fov == 256.0);
  REQUIRE(back.times == dyn.times);
  for (int f = 0; f < 2; ++f)
    for (size_t q = 0; q < dyn.frames[f].v.size(); ++q)
      CHECK(back.frames[f].v[q] == dyn.frames[f].v[q]);
  std::remove(p.c_str());

  CHECK_THROWS_AS(save_dynamic(tmp_path("x"), DynamicImage{}), ConfigError);
  DynamicImage bad = dyn;
  bad.times.pop_back();
  CHECK_THROWS_AS(save_dynamic(tmp_path("x"), bad), ConfigError);
  DynamicImage ragged = dyn;
  ragged.frames[1].v.resize(10);
  CHECK_THROWS_AS(save_dynamic(tmp_path("x"), ragged), ConfigError);
}

TEST_CASE("model checkpoints round trip in both precisions") {
  recon::ReconConfig rc;
  rc.rank = 2;
  rc.hidden = 8;
  rc.seed = 5;
  rc.spatial_grid.levels = 4;
  rc.spatial_grid.features = 2;
  rc.spatial_grid.base_resolution = 4;
  rc.spatial_grid.per_level_scale = 1.5;
  rc.spatial_grid.log2_table_size = 10;
  rc.spatial_grid.dim = 2;
  rc.temporal_grid.levels = 3;
  rc.temporal_grid.features = 2;
  rc.temporal_grid.base_resolution = 4;
  rc.temporal_grid.per_level_scale = 1.5;
  rc.temporal_grid.log2_table_size = 8;
  rc.temporal_grid.dim = 1;
  const GridSpec grid{16, 16, 256.0};
  recon::Model<double> m = recon::make_model<double>(rc, grid, 0.092);

  const std::string p = tmp_path("ckpt64.bin");
  save_checkpoint(p, m);
  LoadedModel lm = load_checkpoint(p);
  CHECK(lm.precision == recon::Precision::f64);
  CHECK(lm.m64.rank == m.rank);
  CHECK(lm.m64.grid.nx == grid.nx);
  CHECK(lm.m64.grid.fov == grid.fov);
  CHECK(lm.m64.t_max == m.t_max);
  REQUIRE(lm.m64.spatial.table.size() == m.spatial.table.size());
  for (size_t l = 0; l < m.spatial.table.size(); ++l)
    CHECK(lm.m64.spatial.table[l] == m.spatial.table[l]);
  CHECK(lm.m64.spatial.mlp.W1 == m.spatial.mlp.W1);
  CHECK(lm.m64.spatial.mlp.b1 == m.spatial.mlp.b1);
  CHECK(lm.m64.spatial.mlp.W2 == m.spatial.mlp.W2);
  CHECK(lm.m64.spatial.mlp.b2 == m.spatial.mlp.b2);
  CHECK(lm.m64.spatial.mlp.W3 == m.spatial.mlp.W3);
  CHECK(lm.m64.spatial.mlp.b3 == m.spatial.mlp.b3);
  for (size_t l = 0; l < m.temporal.table.size(); ++l)
    CHECK(lm.m64.temporal.table[l] == m.temporal.table[l]);
  CHECK(lm.m64.temporal.mlp.W3 == m.temporal.mlp.W3);
  std::remove(p.c_str());

  recon::Model<float> mf;
  mf.rank = 2;
  mf.grid = grid;
  mf.t_max = 0.092;
  mf.spatial.init_shape(rc.spatial_grid, rc.hidden, 2 * rc.rank);
  mf.temporal.init_shape(rc.temporal_grid, rc.hidden, 2 * rc.rank);
  inr::init_parameters(mf.spatial, 5, "s");
  inr::init_parameters(mf.temporal, 5, "t");
  const std::string q = tmp_path("ckpt32.bin");
  save_checkpoint(q, mf);
  LoadedModel lf = load_checkpoint(q);
  CHECK(lf.precision == recon::Precision::f32);
  CHECK(lf.m32.rank == 2);
  for (size_t l = 0; l < mf.spatial.table.size(); ++l)
    CHECK(lf.m32.spatial.table[l] == mf.spatial.table[l]);
  CHECK(lf.m32.spatial.mlp.W1 == mf.spatial.mlp.W1);
  CHECK(lf.m32.temporal.mlp.b3 == mf.temporal.mlp.b3);
  std::remove(q.c_str());

  // a spokes file is a valid container but not a checkpoint
  traj::SpokeSet set;
  set.geo = traj::golden_angle_geometry(2, 8, 256.0, 0.0023, 23.62814);
  set.tr = 0.0023;
  set.fov = 256.0;
  set.samples.assign(2, std::vector<std::vector<cplx>>(1, std::vector<cplx>(8)));
  const std::string s = tmp_path("notckpt.bin");
  save_spokes(s, set, phantom::make_coil_maps(1, grid, 1));
  CHECK_THROWS_AS(load_checkpoint(s), ConfigError);
  std::remove(s.c_str());
}

TEST_CASE("pgm export: windowing, raster order and round trip") {
  const int nx = 4, ny = 3;
  std::vector<double> mag(size_t(nx) * ny);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) mag[size_t(ix) * ny + iy] = (ix + 4.0 * iy) / 12.0;
  mag[0 * ny + 0] = -1.0;  // below window -> 0
  mag[3 * ny + 2] = 7.0;   // above window -> 255

  const std::string p = tmp_path("img.pgm");
  write_pgm(p, mag, nx, ny, 0.0, 1.0);
  PgmImage img = read_pgm(p);
  CHECK(img.nx == nx);
  CHECK(img.ny == ny);
  REQUIRE(img.bytes.size() == size_t(nx) * ny);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      double v = std::min(1.0, std::max(0.0, mag[size_t(ix) * ny + iy]));
      CHECK(img.bytes[size_t(iy) * nx + ix] == (uint8_t)std::lround(255.0 * v));
    }
  std::remove(p.c_str());

  CHECK_THROWS_AS(write_pgm(tmp_path("x"), mag, nx, ny, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(write_pgm(tmp_path("x"), mag, nx + 1, ny, 0.0, 1.0), ConfigError);
  const std::string t = tmp_path("bad.pgm");
  write_text(t, "P6 blah");
  CHECK_THROWS_AS(read_pgm(t), ConfigError);
  std::remove(t.c_str());
}

TEST_CASE("png export matches the pgm quantization") {
  const int nx = 5, ny = 4;
  std::vector<double> mag(size_t(nx) * ny);
  for (size_t i = 0; i < mag.size(); ++i) mag[i] = double(i) / (mag.size() - 1);
  const std::string pp = tmp_path("img2.pgm"), qq = tmp_path("img2.png");
  write_pgm(pp, mag, nx, ny, 0.0, 1.0);
  write_png(qq, mag, nx, ny, 0.0, 1.0);
  PgmImage a = read_pgm(pp);
  PgmImage b = read_png(qq);
  CHECK(b.nx == a.nx);
  CHECK(b.ny == a.ny);
  CHECK(b.bytes == a.bytes);
  CHECK_THROWS_AS(read_png(pp), ConfigError);  // pgm is not a png
  std::remove(pp.c_str());
  std::remove(qq.c_str());
}

TEST_CASE("training log serializes one row per entry") {
  recon::TrainLog lg;
  lg.add("init_spatial", 1, 0.5, 1.25, 1, 77);
  lg.add("finetune", 2, 0.25, 2.5, 0, 4294967295u);
  CHECK(train_log_csv(lg) ==
        "phase,iter,loss,elapsed_s,temporal_frozen,temporal_crc\n"
        "init_spatial,1,0.5,1.25,1,77\n"
        "finetune,2,0.25,2.5,0,4294967295\n");
}

TEST_CASE("experiment config: serialization is a fixed point of parsing") {
  config::ExperimentConfig c0;
  std::string s1 = config::serialize_config(c0);
  config::ExperimentConfig c1 = config::parse_config(s1);
  std::string s2 = config::serialize_config(c1);
  CHECK(s1 == s2);
  CHECK(c1.nx == c0.nx);
  CHECK(c1.scene.blobs.size() == c0.scene.blobs.size());
  CHECK(c1.recon.init_lr == c0.recon.init_lr);
  CHECK(c1.grasp.tv_weight == c0.grasp.tv_weight);
  c1.validate();

  const std::string p = tmp_path("cfg.txt");
  write_text(p, s1);
  config::ExperimentConfig c2 = config::load_config(p);
  CHECK(config::serialize_config(c2) == s1);
  std::remove(p.c_str());
}

TEST_CASE("experiment config: overrides, defaults and the phantom section") {
  std::string text =
      "# comment\n"
      "[run]\n"
      "seed = 11\n"
      "threads = 4\n"
      "\n"
      "[grid]\n"
      "nx = 32\n"
      "[recon]\n"
      "precision = f32\n"
      "rank = 6\n"
      "[hash_spatial]\n"
      "levels = 5\n"
      "[metrics]\n"
      "profile_rows = 1 2 3\n";
  config::ExperimentConfig c = config::parse_config(text);
  CHECK(c.seed == 11u);
  CHECK(c.threads == 4);
  CHECK(c.nx == 32);
  CHECK(c.recon.precision == recon::Precision::f32);
  CHECK(c.recon.rank == 6);
  CHECK(c.recon.spatial_grid.levels == 5);
  REQUIRE(c.profile_rows.size() == 3u);
  CHECK(c.profile_rows[2] == 3);
  // untouched sections keep their defaults, including the phantom
  config::ExperimentConfig d;
  CHECK(c.scene.blobs.size() == d.scene.blobs.size());
  CHECK(c.scene.t_card == d.scene.t_card);
  CHECK(c.n_spokes == d.n_spokes);

  std::string ph =
      "[phantom]\n"
      "t_card = 0.9\n"
      "n_blobs = 1\n"
      "blob0.amp = 1 -0.5\n"
      "blob0.cx = 5 2 -1\n"
      "blob0.cy = -5\n"
      "blob0.sigma = 20\n";
  config::ExperimentConfig e = config::parse_config(ph);
  REQUIRE(e.scene.blobs.size() == 1u);  // section replaces the default scene
  CHECK(e.scene.t_card == 0.9);
  CHECK(e.scene.blobs[0].amplitude == cplx(1.0, -0.5));
  CHECK(e.scene.blobs[0].cx.c0 == 5.0);
  REQUIRE(e.scene.blobs[0].cx.a.size() == 1u);
  CHECK(e.scene.blobs[0].cx.a[0] == 2.0);
  CHECK(e.scene.blobs[0].cx.b[0] == -1.0);
  CHECK(e.scene.blobs[0].sigma.c0 == 20.0);
  CHECK(e.scene.blobs[0].sigma.a.empty());
}

TEST_CASE("experiment config: rejection of malformed input") {
  CHECK_THROWS_AS(config::parse_config("[grid]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[grid\nnx = 32\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[grid]\nnx 32\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[grid]\nnx = abc\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[phantom]\nn_blobs = 0\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[phantom]\nn_blobs = 1\nblob3.amp = 1 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config("[phantom]\nn_blobs = 1\nblob0.cx = 1 2\n"),
                  ConfigError);  // even-length series
  CHECK_THROWS_AS(config::parse_config("[recon]\nprecision = f16\n"), ConfigError);
}

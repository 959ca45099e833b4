#include "dynrad/config.hpp"

#include <charconv>
#include <cmath>

#include "dynrad/io.hpp"

namespace dynrad::config {

ExperimentConfig::ExperimentConfig() { scene = phantom::make_default_phantom(); }

void ExperimentConfig::validate() const {
  grid().validate();
  if (n_spokes < 1) throw ConfigError("trajectory.n_spokes must be >= 1");
  if (samples_per_spoke < 8 || samples_per_spoke % 2 != 0)
    throw ConfigError("trajectory.samples_per_spoke must be even and >= 8");
  if (!(tr > 0)) throw ConfigError("trajectory.tr must be positive");
  if (!(psi_deg > 0)) throw ConfigError("trajectory.psi_deg must be positive");
  if (n_coils < 1) throw ConfigError("coils.n must be >= 1");
  if (noise_enabled && !(target_snr_db > 0))
    throw ConfigError("noise.target_snr_db must be positive when noise is enabled");
  scene.validate(grid().dx(), fov);
  grasp.validate();
  recon.validate();
  if (!signal_roi.valid_in(nx, nx) || !noise_roi.valid_in(nx, nx))
    throw ConfigError("metrics ROIs out of the grid");
  if (signal_roi.overlaps(noise_roi)) throw ConfigError("metrics ROIs overlap");
  if (systole_frame < 0 || diastole_frame < 0)
    throw ConfigError("metrics phase frame indices must be >= 0");
  if (profile_rows.empty()) throw ConfigError("metrics.profile_rows must be non-empty");
  for (int r : profile_rows)
    if (r < 0 || r >= nx) throw ConfigError("metrics.profile_rows out of the grid");
  if (profile_x0 < 0 || profile_x1 >= nx || profile_x0 + 1 >= profile_x1)
    throw ConfigError("metrics profile x-range invalid");
  if (xt_row < 0 || xt_row >= nx) throw ConfigError("metrics.xt_row out of the grid");
  if (frames_spokes_per_bin < 1 || frames_spokes_per_bin > n_spokes)
    throw ConfigError("output.frames_spokes_per_bin out of range");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_f(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  return out;
}

long long parse_i(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: bad unsigned integer for " + key + ": '" + v + "'");
  return out;
}

std::vector<double> parse_f_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split_ws(v)) out.push_back(parse_f(key, tok));
  return out;
}

phantom::FourierSeries parse_series(const std::string& key, const std::string& v) {
  auto c = parse_f_list(key, v);
  if (c.empty() || c.size() % 2 == 0)
    throw ConfigError("config: " + key + " needs an odd count: c0 then (cos,sin) pairs");
  phantom::FourierSeries s;
  s.c0 = c[0];
  for (size_t i = 1; i + 1 < c.size(); i += 2) {
    s.a.push_back(c[i]);
    s.b.push_back(c[i + 1]);
  }
  return s;
}

std::string series_str(const phantom::FourierSeries& s) {
  std::string out = io::fmt_double(s.c0);
  const size_t h = std::max(s.a.size(), s.b.size());
  for (size_t i = 0; i < h; ++i) {
    out += " " + io::fmt_double(i < s.a.size() ? s.a[i] : 0.0);
    out += " " + io::fmt_double(i < s.b.size() ? s.b[i] : 0.0);
  }
  return out;
}

metrics::Roi parse_roi(const std::string& key, const std::string& v) {
  auto c = parse_f_list(key, v);
  if (c.size() != 4) throw ConfigError("config: " + key + " needs 4 values: x0 y0 w h");
  return metrics::Roi{(int)c[0], (int)c[1], (int)c[2], (int)c[3]};
}

std::string roi_str(const metrics::Roi& r) {
  return std::to_string(r.x0) + " " + std::to_string(r.y0) + " " + std::to_string(r.w) +
         " " + std::to_string(r.h);
}

void apply_hash_key(inr::HashGridConfig& h, const std::string& key, const std::string& k,
                    const std::string& v) {
  if (k == "levels")
    h.levels = (int)parse_i(key, v);
  else if (k == "features")
    h.features = (int)parse_i(key, v);
  else if (k == "base_resolution")
    h.base_resolution = (int)parse_i(key, v);
  else if (k == "per_level_scale")
    h.per_level_scale = parse_f(key, v);
  else if (k == "log2_table_size")
    h.log2_table_size = (int)parse_i(key, v);
  else
    throw ConfigError("config: unknown key " + key);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  c.scene.blobs.clear();  // phantom section (re)builds the blob list
  bool phantom_keys_seen = false;
  std::string section;
  size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++lineno;
    if (line.empty() || line[0] == '#') {
      if (pos > text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) +
                                                ": malformed section header");
      section = line.substr(1, line.size() - 2);
      if (pos > text.size()) break;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    std::string key = section + "." + k;

    if (section == "run") {
      if (k == "seed") c.seed = parse_u64(key, v);
      else if (k == "threads") c.threads = (int)parse_i(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "grid") {
      if (k == "nx") c.nx = (int)parse_i(key, v);
      else if (k == "fov") c.fov = parse_f(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "trajectory") {
      if (k == "n_spokes") c.n_spokes = (int)parse_i(key, v);
      else if (k == "samples_per_spoke") c.samples_per_spoke = (int)parse_i(key, v);
      else if (k == "tr") c.tr = parse_f(key, v);
      else if (k == "psi_deg") c.psi_deg = parse_f(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "coils") {
      if (k == "n") c.n_coils = (int)parse_i(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "noise") {
      if (k == "enabled") c.noise_enabled = (int)parse_i(key, v);
      else if (k == "target_snr_db") c.target_snr_db = parse_f(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "phantom") {
      phantom_keys_seen = true;
      if (k == "t_card") {
        c.scene.t_card = parse_f(key, v);
      } else if (k == "n_blobs") {
        c.scene.blobs.resize((size_t)parse_i(key, v));
      } else if (k.rfind("blob", 0) == 0) {
        size_t dot = k.find('.');
        if (dot == std::string::npos) throw ConfigError("config: unknown key " + key);
        int bi = (int)parse_i(key, k.substr(4, dot - 4));
        if (bi < 0 || (size_t)bi >= c.scene.blobs.size())
          throw ConfigError("config: " + key + " out of range (set n_blobs first)");
        std::string f = k.substr(dot + 1);
        phantom::Blob& b = c.scene.blobs[bi];
        if (f == "amp") {
          auto a = parse_f_list(key, v);
          if (a.size() != 2) throw ConfigError("config: " + key + " needs 're im'");
          b.amplitude = cplx(a[0], a[1]);
        } else if (f == "cx") b.cx = parse_series(key, v);
        else if (f == "cy") b.cy = parse_series(key, v);
        else if (f == "sigma") b.sigma = parse_series(key, v);
        else throw ConfigError("config: unknown key " + key);
      } else {
        throw ConfigError("config: unknown key " + key);
      }
    } else if (section == "grasp") {
      if (k == "iterations") c.grasp.iterations = (int)parse_i(key, v);
      else if (k == "tv_weight") c.grasp.tv_weight = parse_f(key, v);
      else if (k == "spokes_per_bin") c.grasp.spokes_per_bin = (int)parse_i(key, v);
      else if (k == "lowres_fraction") c.grasp.lowres_fraction = parse_f(key, v);
      else if (k == "charbonnier_eps") c.grasp.charbonnier_eps = parse_f(key, v);
      else if (k == "power_iters") c.grasp.power_iters = (int)parse_i(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "recon") {
      if (k == "rank") c.recon.rank = (int)parse_i(key, v);
      else if (k == "hidden") c.recon.hidden = (int)parse_i(key, v);
      else if (k == "init_steps") c.recon.init_steps = (int)parse_i(key, v);
      else if (k == "init_lr") c.recon.init_lr = parse_f(key, v);
      else if (k == "finetune_iters") c.recon.finetune_iters = (int)parse_i(key, v);
      else if (k == "finetune_lr") c.recon.finetune_lr = parse_f(key, v);
      else if (k == "freeze_temporal_iters")
        c.recon.freeze_temporal_iters = (int)parse_i(key, v);
      else if (k == "spokes_per_batch") c.recon.spokes_per_batch = (int)parse_i(key, v);
      else if (k == "precision") {
        if (v == "f64") c.recon.precision = recon::Precision::f64;
        else if (v == "f32") c.recon.precision = recon::Precision::f32;
        else throw ConfigError("config: recon.precision must be f64 or f32");
      } else throw ConfigError("config: unknown key " + key);
    } else if (section == "hash_spatial") {
      apply_hash_key(c.recon.spatial_grid, key, k, v);
    } else if (section == "hash_temporal") {
      apply_hash_key(c.recon.temporal_grid, key, k, v);
    } else if (section == "metrics") {
      if (k == "signal_roi") c.signal_roi = parse_roi(key, v);
      else if (k == "noise_roi") c.noise_roi = parse_roi(key, v);
      else if (k == "systole_frame") c.systole_frame = (int)parse_i(key, v);
      else if (k == "diastole_frame") c.diastole_frame = (int)parse_i(key, v);
      else if (k == "profile_rows") {
        c.profile_rows.clear();
        for (double r : parse_f_list(key, v)) c.profile_rows.push_back((int)r);
      } else if (k == "profile_x0") c.profile_x0 = (int)parse_i(key, v);
      else if (k == "profile_x1") c.profile_x1 = (int)parse_i(key, v);
      else if (k == "xt_row") c.xt_row = (int)parse_i(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else if (section == "output") {
      if (k == "frames_spokes_per_bin") c.frames_spokes_per_bin = (int)parse_i(key, v);
      else throw ConfigError("config: unknown key " + key);
    } else {
      throw ConfigError("config: unknown section [" + section + "]");
    }
    if (pos > text.size()) break;
  }
  if (!phantom_keys_seen) c.scene = phantom::make_default_phantom();
  if (c.scene.blobs.empty()) throw ConfigError("config: phantom has no blobs");
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string o;
  auto kv = [&](const char* k, const std::string& v) {
    o += k;
    o += " = ";
    o += v;
    o += "\n";
  };
  auto kvi = [&](const char* k, long long v) { kv(k, std::to_string(v)); };
  auto kvf = [&](const char* k, double v) { kv(k, io::fmt_double(v)); };

  o += "[run]\n";
  kv("seed", std::to_string(c.seed));
  kvi("threads", c.threads);
  o += "\n[grid]\n";
  kvi("nx", c.nx);
  kvf("fov", c.fov);
  o += "\n[trajectory]\n";
  kvi("n_spokes", c.n_spokes);
  kvi("samples_per_spoke", c.samples_per_spoke);
  kvf("tr", c.tr);
  kvf("psi_deg", c.psi_deg);
  o += "\n[coils]\n";
  kvi("n", c.n_coils);
  o += "\n[noise]\n";
  kvi("enabled", c.noise_enabled);
  kvf("target_snr_db", c.target_snr_db);
  o += "\n[phantom]\n";
  kvf("t_card", c.scene.t_card);
  kvi("n_blobs", (long long)c.scene.blobs.size());
  for (size_t i = 0; i < c.scene.blobs.size(); ++i) {
    const auto& b = c.scene.blobs[i];
    const std::string p = "blob" + std::to_string(i) + ".";
    kv((p + "amp").c_str(),
       io::fmt_double(b.amplitude.real()) + " " + io::fmt_double(b.amplitude.imag()));
    kv((p + "cx").c_str(), series_str(b.cx));
    kv((p + "cy").c_str(), series_str(b.cy));
    kv((p + "sigma").c_str(), series_str(b.sigma));
  }
  o += "\n[grasp]\n";
  kvi("iterations", c.grasp.iterations);
  kvf("tv_weight", c.grasp.tv_weight);
  kvi("spokes_per_bin", c.grasp.spokes_per_bin);
  kvf("lowres_fraction", c.grasp.lowres_fraction);
  kvf("charbonnier_eps", c.grasp.charbonnier_eps);
  kvi("power_iters", c.grasp.power_iters);
  o += "\n[recon]\n";
  kvi("rank", c.recon.rank);
  kvi("hidden", c.recon.hidden);
  kvi("init_steps", c.recon.init_steps);
  kvf("init_lr", c.recon.init_lr);
  kvi("finetune_iters", c.recon.finetune_iters);
  kvf("finetune_lr", c.recon.finetune_lr);
  kvi("freeze_temporal_iters", c.recon.freeze_temporal_iters);
  kvi("spokes_per_batch", c.recon.spokes_per_batch);
  kv("precision", c.recon.precision == recon::Precision::f64 ? "f64" : "f32");
  auto hash_section = [&](const char* name, const inr::HashGridConfig& h) {
    o += std::string("\n[") + name + "]\n";
    kvi("levels", h.levels);
    kvi("features", h.features);
    kvi("base_resolution", h.base_resolution);
    kvf("per_level_scale", h.per_level_scale);
    kvi("log2_table_size", h.log2_table_size);
  };
  hash_section("hash_spatial", c.recon.spatial_grid);
  hash_section("hash_temporal", c.recon.temporal_grid);
  o += "\n[metrics]\n";
  kv("signal_roi", roi_str(c.signal_roi));
  kv("noise_roi", roi_str(c.noise_roi));
  kvi("systole_frame", c.systole_frame);
  kvi("diastole_frame", c.diastole_frame);
  {
    std::string rows;
    for (size_t i = 0; i < c.profile_rows.size(); ++i)
      rows += (i ? " " : "") + std::to_string(c.profile_rows[i]);
    kv("profile_rows", rows);
  }
  kvi("profile_x0", c.profile_x0);
  kvi("profile_x1", c.profile_x1);
  kvi("xt_row", c.xt_row);
  o += "\n[output]\n";
  kvi("frames_spokes_per_bin", c.frames_spokes_per_bin);
  return o;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(io::read_text(path));
}

}  // namespace dynrad::config

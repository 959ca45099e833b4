#include "dynrad/baselines.hpp"

#include "dynrad/fourier.hpp"

namespace dynrad::baselines {

DynamicImage nufft_baseline(const traj::SpokeSet& set, const phantom::CoilMaps& coils,
                            int spokes_per_bin, const GridSpec& grid, int n_threads) {
  grid.validate();
  if (!coils.analytic() || coils.n_coils() != set.n_coils())
    throw ConfigError("nufft baseline: coil map / sample coil count mismatch");
  auto bins = traj::bin_spokes(set, spokes_per_bin);
  const int M = set.M();
  const double dk = set.geo.empty() ? 0.0 : set.geo[0].dk;
  auto dcf = subspace::area_dcf(M, dk, grid.dx(), spokes_per_bin);

  // sum-of-squares coil normalization map
  auto rasters = coils.rasterize(grid);
  std::vector<double> sos(size_t(grid.nx) * grid.ny, 0.0);
  for (const auto& r : rasters)
    for (size_t p = 0; p < sos.size(); ++p) sos[p] += std::norm(r.v[p]);

  DynamicImage out;
  out.grid = grid;
  out.times.resize(bins.bins.size());
  out.frames.assign(bins.bins.size(), ComplexImage(grid));
  parallel_for(bins.bins.size(), n_threads, [&](size_t b) {
    auto view = fourier::SpokeSetView::of(set, bins.bins[b].members);
    ComplexImage img = fourier::adjoint_radial(view, dcf, coils, grid);
    for (size_t p = 0; p < img.v.size(); ++p)
      img.v[p] = sos[p] > 1e-300 ? img.v[p] / sos[p] : cplx(0);
    out.frames[b] = std::move(img);
    out.times[b] = bins.bins[b].t_center;
  });
  return out;
}

DynamicImage grasp_baseline(const traj::SpokeSet& set, const phantom::CoilMaps& coils,
                            const subspace::GraspConfig& cfg, const GridSpec& grid,
                            int n_threads, std::vector<double>* objective_trace) {
  cfg.validate();
  grid.validate();
  auto bins = traj::bin_spokes(set, cfg.spokes_per_bin);
  return subspace::grasp_core(set, bins, coils, cfg, grid, n_threads, objective_trace);
}

}  // namespace dynrad::baselines

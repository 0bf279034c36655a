// Diffuse wall/ceiling/floor reflections by recursive patch-to-patch bouncing.
//
// Each patch that receives power P re-emits rho * P as a first-order Lambertian source
// from its center. Order 1 is source -> patch -> PD; order n adds n - 1 patch -> patch hops.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "vlc/channel.hpp"
#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/parallel.hpp"

namespace vlc {

/// Destination for non-fatal diagnostics. Defaults to stderr; tests may swap it.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

struct SurfacePatch {
  Vec3 center;
  Vec3 normal;  // points into the room
  double area{0};
  double reflectivity{0};
};

struct SurfaceMesh {
  std::vector<SurfacePatch> patches;
  double patch_size{0.25};

  double total_area() const {
    double a = 0.0;
    for (const auto& p : patches) a += p.area;
    return a;
  }
};

/// Tiles all six room surfaces with patches no larger than `patch_size` on a side.
inline SurfaceMesh build_surface_mesh(const RoomSpec& room, double patch_size) {
  room.validate();
  require(patch_size > 0, "patch_size must be positive");
  SurfaceMesh mesh;
  mesh.patch_size = patch_size;
  // Rectangle spanned by origin + a * ea + b * eb, a in [0, la], b in [0, lb].
  auto tile = [&](Vec3 origin, Vec3 ea, double la, Vec3 eb, double lb, Vec3 normal, double rho) {
    const auto na = static_cast<int>(std::ceil(la / patch_size - 1e-9));
    const auto nb = static_cast<int>(std::ceil(lb / patch_size - 1e-9));
    const double da = la / na, db = lb / nb;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        mesh.patches.push_back(
            {origin + ea * ((i + 0.5) * da) + eb * ((j + 0.5) * db), normal, da * db, rho});
  };
  const double w = room.width, d = room.depth, h = room.height;
  const double rw = room.wall_reflectivity;
  tile({0, 0, 0}, {1, 0, 0}, w, {0, 0, 1}, h, {0, 1, 0}, rw);
  tile({0, d, 0}, {1, 0, 0}, w, {0, 0, 1}, h, {0, -1, 0}, rw);
  tile({0, 0, 0}, {0, 1, 0}, d, {0, 0, 1}, h, {1, 0, 0}, rw);
  tile({w, 0, 0}, {0, 1, 0}, d, {0, 0, 1}, h, {-1, 0, 0}, rw);
  tile({0, 0, h}, {1, 0, 0}, w, {0, 1, 0}, d, {0, 0, -1}, room.ceiling_reflectivity);
  tile({0, 0, 0}, {1, 0, 0}, w, {0, 1, 0}, d, {0, 0, 1}, room.floor_reflectivity);
  return mesh;
}

/// Total re-emitted power on every patch (per watt of board power, summed over bounce
/// orders 1..max_order), ready to be collected at any number of detectors.
class ReflectionField {
 public:
  ReflectionField(std::span<const TransmitterBoard> boards, const SurfaceMesh& mesh, int max_order,
                  unsigned threads = 1)
      : mesh_(mesh), sources_(boards.size()) {
    require(max_order >= 1, "reflection max_order must be >= 1");
    require(!mesh.patches.empty(), "reflection mesh is empty");
    if (mesh.patch_size > 0.5)
      warning_sink()("reflection patch_size " + std::to_string(mesh.patch_size) +
                     " m exceeds 0.5 m; reflected gains lose accuracy");
    const std::size_t n = mesh.patches.size();
    const std::size_t s = sources_;
    const auto orders = lambertian_orders(boards);

    // Order 1: power landing on each patch, times its reflectivity. Layout [patch][source].
    std::vector<double> current(n * s, 0.0);
    parallel_for(n, threads, [&](std::size_t p) {
      const SurfacePatch& patch = mesh.patches[p];
      for (std::size_t b = 0; b < s; ++b) {
        const Vec3 v = patch.center - boards[b].position;
        const double d2 = v.norm2();
        if (d2 == 0.0) continue;
        const double d = std::sqrt(d2);
        const double cos_phi = boards[b].orientation.dot(v) / d;
        const double cos_in = -patch.normal.dot(v) / d;
        if (cos_phi <= 0.0 || cos_in <= 0.0) continue;
        current[p * s + b] = patch.reflectivity *
                             detail::lambertian_intensity(orders[b], cos_phi) / d2 * cos_in * patch.area;
      }
    });
    emitted_ = current;

    std::vector<double> next(n * s);
    for (int order = 2; order <= max_order; ++order) {
      parallel_for(n, threads, [&](std::size_t i) {
        const SurfacePatch& pi = mesh.patches[i];
        double* out = &next[i * s];
        std::fill(out, out + s, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          const SurfacePatch& pj = mesh.patches[j];
          const Vec3 v = pi.center - pj.center;
          const double d2 = v.norm2();
          if (d2 == 0.0) continue;
          const double d = std::sqrt(d2);
          const double cos_out = pj.normal.dot(v) / d;
          const double cos_in = -pi.normal.dot(v) / d;
          if (cos_out <= 0.0 || cos_in <= 0.0) continue;
          const double f = pi.reflectivity * cos_out * cos_in * pi.area / (kPi * d2);
          const double* src = &current[j * s];
          for (std::size_t b = 0; b < s; ++b) out[b] += src[b] * f;
        }
      });
      current.swap(next);
      for (std::size_t k = 0; k < emitted_.size(); ++k) emitted_[k] += current[k];
    }
  }

  std::size_t sources() const { return sources_; }

  /// Per-source reflected gain at one PD element. Only the FOV part of `gate` applies.
  void gains_to(const PdElement& pd, const Vec3& pos, CoverageGate gate, std::span<double> out) const {
    require(out.size() == sources_, "gains_to: output span size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const bool check_fov = gate == CoverageGate::Fov || gate == CoverageGate::Both;
    const double cos_fov = std::cos(deg2rad(pd.fov_deg));
    for (std::size_t p = 0; p < mesh_.patches.size(); ++p) {
      const SurfacePatch& patch = mesh_.patches[p];
      const Vec3 v = pos - patch.center;
      const double d2 = v.norm2();
      if (d2 < 1e-12) continue;
      const double d = std::sqrt(d2);
      const double cos_out = patch.normal.dot(v) / d;
      const double cos_psi = -pd.normal.dot(v) / d;
      if (cos_out <= 0.0 || cos_psi <= 0.0) continue;
      if (check_fov && cos_psi < cos_fov - 1e-12) continue;
      const double k = cos_out * cos_psi * pd.area() / (kPi * d2);
      const double* e = &emitted_[p * sources_];
      for (std::size_t b = 0; b < sources_; ++b) out[b] += e[b] * k;
    }
  }

 private:
  const SurfaceMesh& mesh_;
  std::size_t sources_;
  std::vector<double> emitted_;  // [patch][source]
};

/// Reflected part of the gain matrix, same shape as `GainMatrix::reflected`.
inline std::vector<double> reflection_gains(std::span<const TransmitterBoard> boards,
                                            std::span<const ReceiverSpec> receivers,
                                            const SurfaceMesh& mesh, int max_order,
                                            CoverageGate gate = CoverageGate::Fov,
                                            unsigned threads = 1) {
  require(max_order >= 1 && max_order <= 4, "reflection max_order must lie in [1, 4]");
  ReflectionField field(boards, mesh, max_order, threads);
  std::size_t cols = 0;
  for (const auto& r : receivers) cols += r.elements.size();
  std::vector<double> out(boards.size() * cols, 0.0);
  std::vector<double> column(boards.size());
  std::size_t c = 0;
  for (const auto& r : receivers) {
    for (const auto& el : r.elements) {
      field.gains_to(el, r.position, gate, column);
      for (std::size_t b = 0; b < boards.size(); ++b) out[b * cols + c] = column[b];
      ++c;
    }
  }
  return out;
}

inline void add_reflections(GainMatrix& g, std::span<const TransmitterBoard> boards,
                            std::span<const ReceiverSpec> receivers, const SurfaceMesh& mesh,
                            int max_order, CoverageGate gate = CoverageGate::Fov,
                            unsigned threads = 1) {
  g.reflected = reflection_gains(boards, receivers, mesh, max_order, gate, threads);
}

}  // namespace vlc

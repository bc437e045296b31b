#pragma once

#include "ktraj/types.hpp"

#include <cstdint>
#include <array>
#include <optional>
#include <span>

namespace ktraj {

struct Ellipse
{
  double intensity;
  double a, b;   // semi-axes
  double x0, y0; // center
  double phi;    // rotation, degrees
};

/// The ten ellipses of the modified (high-contrast) Shepp-Logan head phantom on [-1, 1]^2.
std::array<Ellipse, 10> shepp_logan_ellipses();

/// Rasterizes the phantom by per-pixel ellipse membership, clipped to [0, 1].
/// With a seed, each ellipse's center, axes and angle are jittered by up to 5%.
RealImage shepp_logan(int N, std::optional<std::uint64_t> perturb_seed = std::nullopt);

/// Rasterizes an arbitrary ellipse list with the same pixel-center convention.
RealImage rasterize_ellipses(int N, std::span<Ellipse const> ellipses);

/// mag .* exp(i phi), phi a random polynomial of degree <= 2 in the normalized
/// pixel coordinates, scaled so that max |phi| = pi * smoothness.
ComplexImage synth_phase(RealImage const &mag, double smoothness, std::uint64_t seed);

/// n phantoms with seeds base_seed, base_seed+1, ... and independent phase maps.
std::vector<ComplexImage> phantom_dataset(int N, int n, std::uint64_t base_seed, double phase_smoothness = 0.25);

} // namespace ktraj

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dipswitch {

using Vec3 = std::array<double, 3>;

enum class GeometryKind { Chain, Rectangular, Cubic, Custom };

std::string_view to_string(GeometryKind kind) noexcept;

inline constexpr std::size_t kDefaultMaxDipoles = 14;

/// Dipole positions in units of the lattice constant plus the unit vector of
/// the external field. Positions of the regular kinds are laid out with x
/// varying fastest, then y, then z.
class DipoleGeometry {
 public:
  /// Validates and normalizes; throws Error(InvalidInput / InvalidGeometry).
  DipoleGeometry(GeometryKind kind, std::vector<int> extents, std::vector<Vec3> positions,
                 Vec3 field_direction);

  GeometryKind kind() const noexcept { return kind_; }
  const std::vector<int>& extents() const noexcept { return extents_; }
  const std::vector<Vec3>& positions() const noexcept { return positions_; }
  const Vec3& field_direction() const noexcept { return field_; }
  std::size_t size() const noexcept { return positions_.size(); }

 private:
  GeometryKind kind_;
  std::vector<int> extents_;
  std::vector<Vec3> positions_;
  Vec3 field_;
};

/// Field perpendicular to the chain axis, the plane, or the cube's xy layers.
Vec3 default_field_direction(GeometryKind kind) noexcept;

/// Regular lattice with unit spacing. `extents` holds one entry for a chain,
/// two for a rectangle and three for a cubic block.
DipoleGeometry build_geometry(GeometryKind kind, std::span<const int> extents, Vec3 field_direction,
                              std::size_t max_dipoles = kDefaultMaxDipoles);

DipoleGeometry build_geometry(GeometryKind kind, std::span<const int> extents,
                              std::size_t max_dipoles = kDefaultMaxDipoles);

DipoleGeometry custom_geometry(std::vector<Vec3> positions, Vec3 field_direction,
                               std::size_t max_dipoles = kDefaultMaxDipoles);

/// Dimensionless hopping strengths between every pair of dipoles, scaled so
/// that the reference pair has magnitude one.
class CouplingMatrix {
 public:
  CouplingMatrix(std::size_t n, std::vector<double> values, std::pair<std::size_t, std::size_t> reference);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }
  std::span<const double> values() const noexcept { return values_; }
  std::pair<std::size_t, std::size_t> reference_pair() const noexcept { return reference_; }

  /// Homogeneous matrix from a dense row-major table; used for hand-built
  /// models in tests. Validates symmetry and the zero diagonal.
  static CouplingMatrix from_values(std::size_t n, std::vector<double> values,
                                    std::pair<std::size_t, std::size_t> reference = {0, 1});

 private:
  std::size_t n_;
  std::vector<double> values_;
  std::pair<std::size_t, std::size_t> reference_;
};

struct CouplingOptions {
  std::pair<std::size_t, std::size_t> reference_pair{0, 1};
  /// Pairs farther apart than this (lattice units) do not couple.
  double cutoff_radius = std::numeric_limits<double>::infinity();
};

/// Unnormalized angular/distance factor (1 - 3 cos^2 theta) / r^3 for every
/// pair, row-major N x N with zero diagonal.
std::vector<double> raw_couplings(const DipoleGeometry& geometry);

CouplingMatrix coupling_matrix(const DipoleGeometry& geometry, const CouplingOptions& options = {});

// Physical units -----------------------------------------------------------

struct PhysicalParams {
  double dipole_moment_debye;
  double field_v_per_m;
  double spacing_m;
};

struct ModelScales {
  double omega_joule;     ///< transition energy p E
  double omega_kelvin;
  double coupling_joule;  ///< p^2 / (4 pi eps0 d^3)
  double coupling_kelvin;
  double ratio;           ///< omega / Omega
};

namespace units {
inline constexpr double kDebye = 3.33564095198152e-30;        // C m
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F / m
inline constexpr double kBoltzmann = 1.380649e-23;            // J / K
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace units

ModelScales physical_to_model(const PhysicalParams& params);

}  // namespace dipswitch

#include "dipswitch/geometry.hpp"

#include <cmath>
#include <sstream>

#include "dipswitch/error.hpp"

namespace dipswitch {

std::string_view to_string(GeometryKind kind) noexcept {
  switch (kind) {
    case GeometryKind::Chain: return "chain";
    case GeometryKind::Rectangular: return "rect";
    case GeometryKind::Cubic: return "cubic";
    case GeometryKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 normalized_field(const Vec3& field) {
  const double len = norm(field);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::InvalidInput, "field direction must be a finite nonzero vector");
  }
  return {field[0] / len, field[1] / len, field[2] / len};
}

std::size_t expected_rank(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Chain: return 1;
    case GeometryKind::Rectangular: return 2;
    case GeometryKind::Cubic: return 3;
    case GeometryKind::Custom: return 0;
  }
  return 0;
}

void check_size(std::size_t n, std::size_t max_dipoles) {
  if (n > max_dipoles) {
    std::ostringstream msg;
    msg << n << " dipoles exceeds the configured limit of " << max_dipoles;
    throw Error(ErrorCode::SizeLimit, msg.str());
  }
}

}  // namespace

DipoleGeometry::DipoleGeometry(GeometryKind kind, std::vector<int> extents, std::vector<Vec3> positions,
                               Vec3 field_direction)
    : kind_(kind), extents_(std::move(extents)), positions_(std::move(positions)), field_(normalized_field(field_direction)) {
  if (positions_.empty()) throw Error(ErrorCode::InvalidInput, "geometry has no dipoles");
  if (kind_ != GeometryKind::Custom) {
    std::size_t product = 1;
    for (int e : extents_) product *= static_cast<std::size_t>(e);
    if (product != positions_.size()) {
      throw Error(ErrorCode::InvalidGeometry, "position count does not match the extents");
    }
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_.size(); ++j) {
      const Vec3 d{positions_[j][0] - positions_[i][0], positions_[j][1] - positions_[i][1],
                   positions_[j][2] - positions_[i][2]};
      if (!(norm(d) > 0.0)) {
        std::ostringstream msg;
        msg << "dipoles " << i + 1 << " and " << j + 1 << " coincide";
        throw Error(ErrorCode::InvalidGeometry, msg.str());
      }
    }
  }
}

Vec3 default_field_direction(GeometryKind) noexcept { return {0.0, 0.0, 1.0}; }

DipoleGeometry build_geometry(GeometryKind kind, std::span<const int> extents, Vec3 field_direction,
                              std::size_t max_dipoles) {
  if (kind == GeometryKind::Custom) {
    throw Error(ErrorCode::InvalidInput, "custom geometries take explicit positions");
  }
  if (extents.size() != expected_rank(kind)) {
    std::ostringstream msg;
    msg << to_string(kind) << " geometry needs " << expected_rank(kind) << " extent(s), got "
        << extents.size();
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
  std::array<int, 3> dims{1, 1, 1};
  std::size_t product = 1;
  for (std::size_t a = 0; a < extents.size(); ++a) {
    if (extents[a] <= 0) throw Error(ErrorCode::InvalidInput, "extents must be positive");
    dims[a] = extents[a];
    product *= static_cast<std::size_t>(extents[a]);
    check_size(product, max_dipoles);
  }
  const Vec3 field = normalized_field(field_direction);

  std::vector<Vec3> positions;
  positions.reserve(product);
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x) positions.push_back({double(x), double(y), double(z)});

  return DipoleGeometry(kind, std::vector<int>(extents.begin(), extents.end()), std::move(positions), field);
}

DipoleGeometry build_geometry(GeometryKind kind, std::span<const int> extents, std::size_t max_dipoles) {
  return build_geometry(kind, extents, default_field_direction(kind), max_dipoles);
}

DipoleGeometry custom_geometry(std::vector<Vec3> positions, Vec3 field_direction, std::size_t max_dipoles) {
  check_size(positions.size(), max_dipoles);
  const int n = static_cast<int>(positions.size());
  return DipoleGeometry(GeometryKind::Custom, {n}, std::move(positions), field_direction);
}

CouplingMatrix::CouplingMatrix(std::size_t n, std::vector<double> values,
                               std::pair<std::size_t, std::size_t> reference)
    : n_(n), values_(std::move(values)), reference_(reference) {}

CouplingMatrix CouplingMatrix::from_values(std::size_t n, std::vector<double> values,
                                           std::pair<std::size_t, std::size_t> reference) {
  if (values.size() != n * n) throw Error(ErrorCode::InvalidInput, "coupling table must be N x N");
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i * n + i] != 0.0) throw Error(ErrorCode::InvalidInput, "coupling diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (values[i * n + j] != values[j * n + i]) {
        throw Error(ErrorCode::InvalidInput, "coupling table must be symmetric");
      }
    }
  }
  if (n >= 2 && (reference.first >= n || reference.second >= n || reference.first == reference.second)) {
    throw Error(ErrorCode::InvalidInput, "reference pair out of range");
  }
  return CouplingMatrix(n, std::move(values), reference);
}

std::vector<double> raw_couplings(const DipoleGeometry& geometry) {
  const auto& pos = geometry.positions();
  const Vec3& f = geometry.field_direction();
  const std::size_t n = pos.size();
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 d{pos[j][0] - pos[i][0], pos[j][1] - pos[i][1], pos[j][2] - pos[i][2]};
      const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
      if (!(r2 > 0.0)) throw Error(ErrorCode::InvalidGeometry, "coincident dipole positions");
      const double r = std::sqrt(r2);
      const double proj = d[0] * f[0] + d[1] * f[1] + d[2] * f[2];
      // cos^2 theta = proj^2 / r^2
      const double value = (1.0 - 3.0 * proj * proj / r2) / (r2 * r);
      raw[i * n + j] = value;
      raw[j * n + i] = value;
    }
  }
  return raw;
}

CouplingMatrix coupling_matrix(const DipoleGeometry& geometry, const CouplingOptions& options) {
  const std::size_t n = geometry.size();
  if (n < 2) throw Error(ErrorCode::InvalidInput, "coupling matrix needs at least two dipoles");
  const auto [ri, rj] = options.reference_pair;
  if (ri >= n || rj >= n || ri == rj) throw Error(ErrorCode::InvalidInput, "reference pair out of range");

  std::vector<double> raw = raw_couplings(geometry);
  const auto& pos = geometry.positions();
  const auto within_cutoff = [&](std::size_t i, std::size_t j) {
    if (std::isinf(options.cutoff_radius)) return true;
    const Vec3 d{pos[j][0] - pos[i][0], pos[j][1] - pos[i][1], pos[j][2] - pos[i][2]};
    return norm(d) <= options.cutoff_radius;
  };

  const double reference = raw[ri * n + rj];
  // Anything this small relative to 1/r^3 is the magic angle up to rounding.
  const auto& pr = pos[ri];
  const auto& ps = pos[rj];
  const double r_ref = norm(Vec3{ps[0] - pr[0], ps[1] - pr[1], ps[2] - pr[2]});
  if (std::abs(reference) * r_ref * r_ref * r_ref < 1e-12 || !within_cutoff(ri, rj)) {
    throw Error(ErrorCode::DegenerateReference,
                "reference pair coupling vanishes (magic angle or beyond cutoff)");
  }
  const double scale = 1.0 / std::abs(reference);

  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = within_cutoff(i, j) ? raw[i * n + j] * scale : 0.0;
      values[i * n + j] = v;
      values[j * n + i] = v;
    }
  }
  // Exact unit magnitude for the reference pair, free of the division's rounding.
  values[ri * n + rj] = values[rj * n + ri] = std::copysign(1.0, reference);
  return CouplingMatrix(n, std::move(values), options.reference_pair);
}

ModelScales physical_to_model(const PhysicalParams& params) {
  if (!(params.dipole_moment_debye > 0.0) || !(params.field_v_per_m > 0.0) || !(params.spacing_m > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "dipole moment, field and spacing must be strictly positive");
  }
  using namespace units;
  const double p = params.dipole_moment_debye * kDebye;
  const double d3 = params.spacing_m * params.spacing_m * params.spacing_m;
  ModelScales s{};
  s.omega_joule = p * params.field_v_per_m;
  s.coupling_joule = p * p / (4.0 * kPi * kVacuumPermittivity * d3);
  s.omega_kelvin = s.omega_joule / kBoltzmann;
  s.coupling_kelvin = s.coupling_joule / kBoltzmann;
  s.ratio = s.omega_joule / s.coupling_joule;
  return s;
}

}  // namespace dipswitch

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "dipswitch/geometry.hpp"

namespace dipswitch {

struct GeometrySpec {
  GeometryKind kind = GeometryKind::Chain;
  std::vector<int> extents{2};
  std::optional<Vec3> field_direction;  ///< default_field_direction(kind) when unset
  double cutoff_radius = std::numeric_limits<double>::infinity();
  std::size_t max_dipoles = kDefaultMaxDipoles;

  DipoleGeometry build() const;
  CouplingMatrix couplings() const;
};

/// Inclusive grid start, start + step, ... up to stop.
struct XRange {
  double start = 0.0;
  double stop = 2.0;
  double step = 1e-3;

  std::vector<double> grid() const;
};

using PairIndex = std::pair<std::size_t, std::size_t>;  ///< 0-based

struct SweepConfig {
  GeometrySpec geometry;
  XRange x_range;
  std::vector<double> temperatures{1e-4};  ///< kT in units of the reference coupling
  std::vector<PairIndex> pairs{{0, 1}};
  bool all_pairs = false;
  bool detect_transitions = true;
  /// Adjacent ground states overlapping less than this mark a transition.
  double fidelity_threshold = 0.5;
  /// Concurrence steps larger than this between grid points are annotated.
  double jump_threshold = 0.05;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

enum class TransitionKind { Crossing, Degenerate, Jump };

std::string_view to_string(TransitionKind kind) noexcept;

struct Transition {
  double x_star;
  double kT;
  TransitionKind kind;
  double x_lo;  ///< bracketing interval or flagged region
  double x_hi;
};

struct SweepRow {
  double x;
  double kT;
  std::size_t i;  ///< 0-based
  std::size_t j;
  double concurrence;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< sorted by (kT, x, i, j)
  std::vector<Transition> transitions;
};

/// Throws Error(InvalidConfig) describing the first problem found.
void validate(const SweepConfig& config, std::size_t dipoles);

SweepResult run_sweep(const SweepConfig& config);

struct TransitionOptions {
  double fidelity_threshold = 0.5;
  /// Bisection stops once the bracket is narrower than this.
  double tolerance = 1e-8;
  unsigned threads = 0;
};

/// Ground-state level crossings on the x grid, refined by bisection. Every
/// returned entry carries `kT` as given; kinds are Crossing or Degenerate.
std::vector<Transition> detect_transitions(const CouplingMatrix& couplings, const XRange& range, double kT,
                                           const TransitionOptions& options = {});

std::vector<Transition> detect_transitions(const GeometrySpec& geometry, double kT, const XRange& range,
                                           double fidelity_threshold = 0.5);

/// Number formatting used by every CSV writer: 9 significant digits,
/// locale independent.
std::string format_number(double value);

/// Header `x,kT,i,j,concurrence`; dipole indices written 1-based.
void emit_csv(const SweepResult& result, std::ostream& out);
/// Header `x_star,kT,kind`.
void emit_transitions_csv(const SweepResult& result, std::ostream& out);

/// Writes through a temporary file renamed into place on success. Throws
/// Error(Io) naming the path on failure and leaves no partial output.
void write_csv_files(const SweepResult& result, const std::filesystem::path& rows_path,
                     const std::optional<std::filesystem::path>& transitions_path);

/// Sibling transitions path: "fig1.csv" -> "fig1.transitions.csv".
std::filesystem::path transitions_path_for(const std::filesystem::path& rows_path);

}  // namespace dipswitch

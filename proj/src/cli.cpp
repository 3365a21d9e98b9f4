#include "dipswitch/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

#include "dipswitch/entanglement.hpp"
#include "dipswitch/error.hpp"
#include "dipswitch/hamiltonian.hpp"
#include "dipswitch/simd/kernels.hpp"
#include "dipswitch/spectral.hpp"

namespace dipswitch::cli {

namespace {

[[noreturn]] void usage(std::string_view flag, std::string_view problem) {
  std::ostringstream msg;
  msg << flag << ": " << problem;
  throw UsageError(msg.str());
}

// from_chars is locale independent: only '.' is accepted as decimal point.
double parse_double(std::string_view flag, std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    usage(flag, "malformed number '" + std::string(text) + "'");
  }
  return value;
}

long parse_int(std::string_view flag, std::string_view text) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    usage(flag, "malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

GeometryKind parse_kind(const std::string& text) {
  if (text == "chain") return GeometryKind::Chain;
  if (text == "rect") return GeometryKind::Rectangular;
  if (text == "cubic") return GeometryKind::Cubic;
  usage("--geometry", "expected chain, rect or cubic, got '" + text + "'");
}

struct RawFlags {
  std::string geometry;
  std::string extents;
  std::string field_dir;
  std::string cutoff;
  std::string x_min = "0";
  std::string x_max = "2";
  std::string x_step = "0.001";
  std::string x;
  std::vector<std::string> kt;
  std::string pairs = "1:2";
  std::string out;
  std::string transitions;
  std::string threshold;
  bool no_transitions = false;
  std::string threads;
  std::string dipole;
  std::string field;
  std::string spacing;
};

void add_geometry_flags(CLI::App* cmd, RawFlags& raw) {
  cmd->add_option("--geometry", raw.geometry, "chain | rect | cubic")->required();
  cmd->add_option("--extents", raw.extents, "a[,b[,c]] dipoles along x, y, z")->required();
  cmd->add_option("--field-dir", raw.field_dir, "x,y,z field direction (default perpendicular)");
  cmd->add_option("--cutoff", raw.cutoff, "coupling cutoff radius in lattice units");
  cmd->add_option("--threads", raw.threads, "worker threads (default: all cores)");
}

void fill_geometry(const RawFlags& raw, SweepConfig& config) {
  GeometrySpec& g = config.geometry;
  g.kind = parse_kind(raw.geometry);
  g.extents.clear();
  for (auto part : split(raw.extents, ',')) {
    const long e = parse_int("--extents", part);
    if (e <= 0) usage("--extents", "extents must be positive");
    g.extents.push_back(static_cast<int>(e));
  }
  const std::size_t rank = g.kind == GeometryKind::Chain ? 1 : g.kind == GeometryKind::Rectangular ? 2 : 3;
  if (g.extents.size() != rank) {
    usage("--extents", "expected " + std::to_string(rank) + " value(s) for " + raw.geometry);
  }
  std::size_t n = 1;
  for (int e : g.extents) n *= static_cast<std::size_t>(e);
  if (n > g.max_dipoles) usage("--extents", std::to_string(n) + " dipoles exceeds the limit of 14");

  if (!raw.field_dir.empty()) {
    const auto parts = split(raw.field_dir, ',');
    if (parts.size() != 3) usage("--field-dir", "expected three comma-separated components");
    Vec3 f{};
    for (std::size_t a = 0; a < 3; ++a) f[a] = parse_double("--field-dir", parts[a]);
    if (f[0] == 0.0 && f[1] == 0.0 && f[2] == 0.0) usage("--field-dir", "field direction must be nonzero");
    g.field_direction = f;
  }
  if (!raw.cutoff.empty()) {
    g.cutoff_radius = parse_double("--cutoff", raw.cutoff);
    if (!(g.cutoff_radius > 0.0)) usage("--cutoff", "cutoff must be positive");
  }
  if (!raw.threads.empty()) {
    const long t = parse_int("--threads", raw.threads);
    if (t < 0) usage("--threads", "thread count must be non-negative");
    config.threads = static_cast<unsigned>(t);
  }

  if (raw.pairs == "all") {
    config.all_pairs = true;
    config.pairs.clear();
  } else {
    config.all_pairs = false;
    config.pairs.clear();
    for (auto item : split(raw.pairs, ',')) {
      const auto ij = split(item, ':');
      if (ij.size() != 2) usage("--pairs", "expected i:j, got '" + std::string(item) + "'");
      const long i = parse_int("--pairs", ij[0]);
      const long j = parse_int("--pairs", ij[1]);
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n || i == j) {
        usage("--pairs", "pair " + std::string(item) + " is not two distinct dipoles in 1.." + std::to_string(n));
      }
      // 1-based on the command line, 0-based from here on.
      config.pairs.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)});
    }
  }

  config.temperatures.clear();
  for (const auto& t : raw.kt) {
    const double kT = parse_double("--kt", t);
    if (!(kT >= 0.0)) usage("--kt", "temperatures must be non-negative");
    config.temperatures.push_back(kT);
  }
  if (config.temperatures.empty()) config.temperatures.push_back(1e-4);
}

double positive(std::string_view flag, const std::string& text) {
  const double v = parse_double(flag, text);
  if (!(v > 0.0) || !std::isfinite(v)) usage(flag, "must be a positive number");
  return v;
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Dipole-array entanglement switch: spectra, concurrence sweeps and feasibility estimates",
               "dipswitch"};
  app.require_subcommand(1);
  RawFlags raw;
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "progress messages on standard error");

  auto* sweep = app.add_subcommand("sweep", "concurrence over an x = omega/Omega grid");
  add_geometry_flags(sweep, raw);
  sweep->add_option("--x-min", raw.x_min, "grid start (default 0)");
  sweep->add_option("--x-max", raw.x_max, "grid stop, inclusive (default 2)");
  sweep->add_option("--x-step", raw.x_step, "grid step (default 0.001)");
  sweep->add_option("--kt", raw.kt, "temperature kT in units of Omega; repeatable (default 1e-4)");
  sweep->add_option("--pairs", raw.pairs, "all | i:j[,i:j...] (1-based, default 1:2)");
  sweep->add_option("--out", raw.out, "CSV output path (default standard output)");
  sweep->add_option("--transitions", raw.transitions, "transitions CSV path (default next to --out)");
  sweep->add_option("--threshold", raw.threshold, "ground-state overlap threshold (default 0.5)");
  sweep->add_flag("--no-transitions", raw.no_transitions, "skip transition detection");

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues at one x");
  add_geometry_flags(spectrum, raw);
  spectrum->add_option("--x", raw.x, "omega/Omega")->required();
  spectrum->add_option("--out", raw.out, "output path (default standard output)");

  auto* point = app.add_subcommand("point", "pairwise concurrence at one x");
  add_geometry_flags(point, raw);
  point->add_option("--x", raw.x, "omega/Omega")->required();
  point->add_option("--kt", raw.kt, "temperature kT; repeatable (default 1e-4)");
  point->add_option("--pairs", raw.pairs, "all | i:j[,i:j...] (1-based, default 1:2)");
  point->add_option("--out", raw.out, "output path (default standard output)");

  auto* feasibility = app.add_subcommand("feasibility", "physical scales for a dipole array");
  feasibility->add_option("--dipole", raw.dipole, "dipole moment in Debye")->required();
  feasibility->add_option("--field", raw.field, "electric field in V/m")->required();
  feasibility->add_option("--spacing", raw.spacing, "dipole spacing in meters")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CliInvocation inv;
  inv.verbosity = verbosity;
  if (!raw.out.empty()) inv.out = raw.out;

  if (feasibility->parsed()) {
    inv.subcommand = Subcommand::Feasibility;
    inv.physical.dipole_moment_debye = positive("--dipole", raw.dipole);
    inv.physical.field_v_per_m = positive("--field", raw.field);
    inv.physical.spacing_m = positive("--spacing", raw.spacing);
    return inv;
  }

  fill_geometry(raw, inv.sweep);
  if (sweep->parsed()) {
    inv.subcommand = Subcommand::Sweep;
    XRange& r = inv.sweep.x_range;
    r.start = parse_double("--x-min", raw.x_min);
    r.stop = parse_double("--x-max", raw.x_max);
    r.step = parse_double("--x-step", raw.x_step);
    if (!(r.step > 0.0) || !std::isfinite(r.step)) usage("--x-step", "step must be positive");
    if (!(r.start < r.stop) || !std::isfinite(r.start) || !std::isfinite(r.stop)) {
      usage("--x-max", "must be greater than --x-min");
    }
    if ((r.stop - r.start) / r.step > 1e8) usage("--x-step", "grid would exceed 1e8 points");
    if (!raw.threshold.empty()) {
      inv.sweep.fidelity_threshold = parse_double("--threshold", raw.threshold);
      if (!(inv.sweep.fidelity_threshold > 0.0 && inv.sweep.fidelity_threshold < 1.0)) {
        usage("--threshold", "must lie strictly between 0 and 1");
      }
    }
    inv.sweep.detect_transitions = !raw.no_transitions;
    if (!raw.transitions.empty()) {
      inv.transitions_out = raw.transitions;
    } else if (inv.out && inv.sweep.detect_transitions) {
      inv.transitions_out = transitions_path_for(*inv.out);
    }
    if (inv.transitions_out && !inv.out) usage("--transitions", "requires --out");
  } else {
    inv.subcommand = spectrum->parsed() ? Subcommand::Spectrum : Subcommand::Point;
    inv.x = parse_double("--x", raw.x);
    if (!std::isfinite(inv.x)) usage("--x", "must be finite");
  }
  return inv;
}

namespace {

template <class Emit>
void deliver(const CliInvocation& inv, std::ostream& out, Emit&& emit) {
  if (!inv.out) {
    emit(out);
    return;
  }
  // Same temporary-then-rename path as the sweep writer.
  const auto tmp = std::filesystem::path(inv.out->string() + ".tmp");
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::Io, "cannot open " + inv.out->string() + " for writing");
    emit(file);
    file.flush();
    if (!file) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::Io, "write failed for " + inv.out->string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *inv.out, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move output into place at " + inv.out->string());
  }
}

int run_feasibility(const CliInvocation& inv, std::ostream& out) {
  const ModelScales s = physical_to_model(inv.physical);
  out << "omega_J=" << format_number(s.omega_joule) << '\n'
      << "omega_K=" << format_number(s.omega_kelvin) << '\n'
      << "Omega_J=" << format_number(s.coupling_joule) << '\n'
      << "Omega_K=" << format_number(s.coupling_kelvin) << '\n'
      << "ratio=" << format_number(s.ratio) << '\n';
  return kExitOk;
}

int run_spectrum(const CliInvocation& inv, std::ostream& out) {
  HamiltonianOptions options;
  options.representation = Representation::Sectors;
  const auto spec = diagonalize(build_hamiltonian(inv.sweep.geometry.couplings(), inv.x, options),
                                DiagonalizeOptions{false});
  deliver(inv, out, [&](std::ostream& o) {
    o << "index,energy,excitations\n";
    for (std::size_t g = 0; g < spec.size(); ++g) {
      o << g + 1 << ',' << format_number(spec.eigenvalue(g)) << ',' << spec.sector(g) << '\n';
    }
  });
  return kExitOk;
}

int run_point(const CliInvocation& inv, std::ostream& out) {
  SweepConfig config = inv.sweep;
  // Step longer than the range: the grid is the single point x.
  config.x_range = {inv.x, inv.x + 0.5, 1.0};
  config.detect_transitions = false;
  const SweepResult result = run_sweep(config);
  deliver(inv, out, [&](std::ostream& o) { emit_csv(result, o); });
  return kExitOk;
}

int run_sweep_command(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.verbosity > 0) {
    const auto xs = inv.sweep.x_range.grid();
    err << "sweep: " << xs.size() << " x points, " << inv.sweep.temperatures.size() << " temperature(s), kernels "
        << simd::to_string(simd::active().isa) << '\n';
  }
  const SweepResult result = run_sweep(inv.sweep);
  if (inv.verbosity > 0) {
    err << "sweep: " << result.rows.size() << " rows, " << result.transitions.size() << " transition record(s)\n";
  }
  if (inv.out) {
    write_csv_files(result, *inv.out, inv.transitions_out);
  } else {
    emit_csv(result, out);
  }
  return kExitOk;
}

}  // namespace

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
      case Subcommand::Feasibility: return run_feasibility(inv, out);
      case Subcommand::Spectrum: return run_spectrum(inv, out);
      case Subcommand::Point: return run_point(inv, out);
      case Subcommand::Sweep: return run_sweep_command(inv, out, err);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_args(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for the list of flags.\n";
    return kExitUsage;
  }
  return run(inv, out, err);
}

}  // namespace dipswitch::cli

#include "dipswitch/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include "dipswitch/entanglement.hpp"
#include "dipswitch/error.hpp"
#include "dipswitch/hamiltonian.hpp"
#include "dipswitch/simd/kernels.hpp"
#include "dipswitch/spectral.hpp"
#include "parallel.hpp"

namespace dipswitch {

std::string_view to_string(TransitionKind kind) noexcept {
  switch (kind) {
    case TransitionKind::Crossing: return "crossing";
    case TransitionKind::Degenerate: return "degenerate";
    case TransitionKind::Jump: return "jump";
  }
  return "unknown";
}

DipoleGeometry GeometrySpec::build() const {
  return build_geometry(kind, extents, field_direction.value_or(default_field_direction(kind)), max_dipoles);
}

CouplingMatrix GeometrySpec::couplings() const {
  CouplingOptions options;
  options.cutoff_radius = cutoff_radius;
  return coupling_matrix(build(), options);
}

std::vector<double> XRange::grid() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidConfig, "x step must be positive");
  if (!(start < stop) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(ErrorCode::InvalidConfig, "x range needs start < stop");
  }
  const double span = (stop - start) / step;
  if (span > 1e8) throw Error(ErrorCode::InvalidConfig, "x grid too large");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k) xs[k] = start + static_cast<double>(k) * step;
  return xs;
}

namespace {

// Ground space at one x, stored block-locally: states in different blocks
// are orthogonal without looking at amplitudes.
struct GroundSample {
  double x = 0.0;
  int sector = -1;  ///< sector of the lowest eigenpair
  bool degenerate = false;
  std::size_t block = 0;
  std::vector<double> amplitudes;
};

GroundSample sample_ground(const SpectralDecomposition& spec, double x) {
  GroundSample s;
  s.x = x;
  s.sector = spec.sector(0);
  s.degenerate = spec.ground_degeneracy() > 1;
  s.block = spec.block_index(0);
  const auto& blk = spec.blocks()[s.block];
  const std::size_t d = blk.values.size();
  const std::size_t m = spec.index_in_block(0);
  s.amplitudes.resize(d);
  for (std::size_t p = 0; p < d; ++p) s.amplitudes[p] = blk.vectors[p * d + m];
  return s;
}

double overlap(const GroundSample& a, const GroundSample& b) {
  if (a.block != b.block) return 0.0;
  return std::abs(simd::dot(a.amplitudes, b.amplitudes));
}

HamiltonianOptions sector_blocks() {
  HamiltonianOptions o;
  o.representation = Representation::Sectors;
  return o;
}

class TransitionFinder {
 public:
  TransitionFinder(const CouplingMatrix& couplings, const TransitionOptions& options)
      : couplings_(couplings), options_(options) {}

  GroundSample sample(double x) const {
    const auto spec = diagonalize(build_hamiltonian(couplings_, x, sector_blocks()));
    return sample_ground(spec, x);
  }

  int ground_sector(double x) const {
    DiagonalizeOptions values_only;
    values_only.want_vectors = false;
    return diagonalize(build_hamiltonian(couplings_, x, sector_blocks()), values_only).sector(0);
  }

  std::vector<Transition> scan(const std::vector<GroundSample>& samples, double kT) const {
    std::vector<Transition> out;
    std::vector<std::size_t> clean;
    for (std::size_t k = 0; k < samples.size(); ++k)
      if (!samples[k].degenerate) clean.push_back(k);

    const auto flag_region = [&](std::size_t first, std::size_t last) {
      const double lo = samples[first].x;
      const double hi = samples[last].x;
      out.push_back({0.5 * (lo + hi), kT, TransitionKind::Degenerate, lo, hi});
    };

    if (clean.empty()) {
      if (!samples.empty()) flag_region(0, samples.size() - 1);
      return out;
    }
    if (clean.front() >= 2) flag_region(0, clean.front() - 1);
    for (std::size_t c = 0; c + 1 < clean.size(); ++c) {
      const std::size_t a = clean[c];
      const std::size_t b = clean[c + 1];
      if (b - a - 1 >= 2) {
        flag_region(a + 1, b - 1);
        continue;
      }
      if (overlap(samples[a], samples[b]) >= options_.fidelity_threshold) continue;
      std::vector<double> found;
      if (samples[a].sector != samples[b].sector && samples[a].sector >= 0 && samples[b].sector >= 0) {
        refine_by_sector(samples[a].x, samples[b].x, samples[a].sector, samples[b].sector, found);
      } else {
        found.push_back(refine_by_overlap(samples[a], samples[b].x));
      }
      for (double x : found) out.push_back({x, kT, TransitionKind::Crossing, samples[a].x, samples[b].x});
    }
    if (samples.size() - 1 - clean.back() >= 2) flag_region(clean.back() + 1, samples.size() - 1);
    return out;
  }

 private:
  // Bisection on which excitation sector holds the lowest level. A third
  // sector showing up inside the bracket splits it in two.
  void refine_by_sector(double lo, double hi, int left, int right, std::vector<double>& found, int depth = 0) const {
    while (hi - lo > options_.tolerance) {
      const double mid = 0.5 * (lo + hi);
      const int s = ground_sector(mid);
      if (s == left) {
        lo = mid;
      } else if (s == right) {
        hi = mid;
      } else {
        if (depth > 32) break;
        refine_by_sector(lo, mid, left, s, found, depth + 1);
        refine_by_sector(mid, hi, s, right, found, depth + 1);
        return;
      }
    }
    found.push_back(0.5 * (lo + hi));
  }

  double refine_by_overlap(const GroundSample& left, double hi) const {
    double lo = left.x;
    while (hi - lo > options_.tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (overlap(left, sample(mid)) >= options_.fidelity_threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  const CouplingMatrix& couplings_;
  TransitionOptions options_;
};

std::vector<PairIndex> resolve_pairs(const SweepConfig& config, std::size_t n) {
  std::set<PairIndex> unique;
  if (config.all_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) unique.insert({i, j});
  } else {
    for (auto [i, j] : config.pairs) unique.insert({std::min(i, j), std::max(i, j)});
  }
  return {unique.begin(), unique.end()};
}

}  // namespace

void validate(const SweepConfig& config, std::size_t dipoles) {
  (void)config.x_range.grid();
  if (config.temperatures.empty()) throw Error(ErrorCode::InvalidConfig, "at least one temperature is required");
  for (double kT : config.temperatures) {
    if (!(kT >= 0.0)) throw Error(ErrorCode::InvalidConfig, "temperatures must be non-negative");
  }
  if (dipoles < 2) throw Error(ErrorCode::InvalidConfig, "a sweep needs at least two dipoles");
  if (!config.all_pairs) {
    if (config.pairs.empty()) throw Error(ErrorCode::InvalidConfig, "empty pair set");
    for (auto [i, j] : config.pairs) {
      if (i == j || i >= dipoles || j >= dipoles) {
        std::ostringstream msg;
        msg << "pair " << i + 1 << ":" << j + 1 << " is invalid for " << dipoles << " dipoles";
        throw Error(ErrorCode::InvalidConfig, msg.str());
      }
    }
  }
  if (!(config.fidelity_threshold > 0.0 && config.fidelity_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "fidelity threshold must lie in (0, 1)");
  }
  if (!(config.jump_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "jump threshold must be positive");
}

std::vector<Transition> detect_transitions(const CouplingMatrix& couplings, const XRange& range, double kT,
                                           const TransitionOptions& options) {
  const std::vector<double> xs = range.grid();
  const TransitionFinder finder(couplings, options);
  std::vector<GroundSample> samples(xs.size());
  detail::parallel_for(xs.size(), options.threads, [&](std::size_t k) { samples[k] = finder.sample(xs[k]); });
  return finder.scan(samples, kT);
}

std::vector<Transition> detect_transitions(const GeometrySpec& geometry, double kT, const XRange& range,
                                           double fidelity_threshold) {
  TransitionOptions options;
  options.fidelity_threshold = fidelity_threshold;
  return detect_transitions(geometry.couplings(), range, kT, options);
}

SweepResult run_sweep(const SweepConfig& config) {
  const CouplingMatrix couplings = config.geometry.couplings();
  const std::size_t n = couplings.size();
  validate(config, n);

  const std::vector<double> xs = config.x_range.grid();
  std::vector<double> temps = config.temperatures;
  std::sort(temps.begin(), temps.end());
  temps.erase(std::unique(temps.begin(), temps.end()), temps.end());
  const std::vector<PairIndex> pairs = resolve_pairs(config, n);

  std::vector<double> betas;
  for (double kT : temps) betas.push_back(beta_from_temperature(kT));

  const std::size_t per_x = temps.size() * pairs.size();
  std::vector<double> values(xs.size() * per_x);
  std::vector<GroundSample> samples(config.detect_transitions ? xs.size() : 0);

  detail::parallel_for(xs.size(), config.threads, [&](std::size_t k) {
    // One diagonalization per x, shared by every temperature.
    const auto spec = std::make_shared<const SpectralDecomposition>(
        diagonalize(build_hamiltonian(couplings, xs[k], sector_blocks())));
    if (config.detect_transitions) samples[k] = sample_ground(*spec, xs[k]);
    for (std::size_t t = 0; t < temps.size(); ++t) {
      const ThermalState state = thermal_state(spec, betas[t]);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        values[k * per_x + t * pairs.size() + p] = concurrence(reduce_to_pair(state, pairs[p].first, pairs[p].second));
      }
    }
  });

  SweepResult result;
  result.rows.reserve(values.size());
  for (std::size_t t = 0; t < temps.size(); ++t)
    for (std::size_t k = 0; k < xs.size(); ++k)
      for (std::size_t p = 0; p < pairs.size(); ++p)
        result.rows.push_back({xs[k], temps[t], pairs[p].first, pairs[p].second, values[k * per_x + t * pairs.size() + p]});

  if (config.detect_transitions) {
    TransitionOptions options;
    options.fidelity_threshold = config.fidelity_threshold;
    options.threads = config.threads;
    const TransitionFinder finder(couplings, options);
    const std::vector<Transition> crossings = finder.scan(samples, 0.0);

    for (std::size_t t = 0; t < temps.size(); ++t) {
      std::vector<Transition> here;
      for (Transition c : crossings) {
        c.kT = temps[t];
        here.push_back(c);
      }
      std::set<std::size_t> jumps;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
          const double a = values[k * per_x + t * pairs.size() + p];
          const double b = values[(k + 1) * per_x + t * pairs.size() + p];
          if (std::abs(b - a) > config.jump_threshold) jumps.insert(k);
        }
      }
      for (std::size_t k : jumps) {
        here.push_back({0.5 * (xs[k] + xs[k + 1]), temps[t], TransitionKind::Jump, xs[k], xs[k + 1]});
      }
      std::stable_sort(here.begin(), here.end(), [](const Transition& a, const Transition& b) {
        if (a.x_star != b.x_star) return a.x_star < b.x_star;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
      });
      result.transitions.insert(result.transitions.end(), here.begin(), here.end());
    }
  }
  return result;
}

std::string format_number(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  out << "x,kT,i,j,concurrence\n";
  for (const SweepRow& r : result.rows) {
    out << format_number(r.x) << ',' << format_number(r.kT) << ',' << r.i + 1 << ',' << r.j + 1 << ','
        << format_number(r.concurrence) << '\n';
  }
}

void emit_transitions_csv(const SweepResult& result, std::ostream& out) {
  out << "x_star,kT,kind\n";
  for (const Transition& t : result.transitions) {
    out << format_number(t.x_star) << ',' << format_number(t.kT) << ',' << to_string(t.kind) << '\n';
  }
}

std::filesystem::path transitions_path_for(const std::filesystem::path& rows_path) {
  std::filesystem::path p = rows_path;
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  p += ".transitions" + ext;
  return p;
}

namespace {

std::filesystem::path temporary_for(const std::filesystem::path& target) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  return tmp;
}

template <class Writer>
void write_temporary(const std::filesystem::path& target, Writer&& writer) {
  const auto tmp = temporary_for(target);
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + target.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) {
    out.close();
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "write failed for " + target.string());
  }
}

}  // namespace

void write_csv_files(const SweepResult& result, const std::filesystem::path& rows_path,
                     const std::optional<std::filesystem::path>& transitions_path) {
  std::vector<std::filesystem::path> written;
  const auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(temporary_for(p), ec);
  };
  try {
    write_temporary(rows_path, [&](std::ostream& o) { emit_csv(result, o); });
    written.push_back(rows_path);
    if (transitions_path) {
      write_temporary(*transitions_path, [&](std::ostream& o) { emit_transitions_csv(result, o); });
      written.push_back(*transitions_path);
    }
    for (const auto& p : written) {
      std::error_code ec;
      std::filesystem::rename(temporary_for(p), p, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot move output into place at " + p.string() + ": " + ec.message());
    }
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace dipswitch

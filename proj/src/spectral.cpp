#include "dipswitch/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "dipswitch/error.hpp"
#include "dipswitch/linalg.hpp"

namespace dipswitch {

double beta_from_temperature(double kT) {
  if (!(kT >= 0.0)) throw Error(ErrorCode::InvalidInput, "temperature must be non-negative");
  if (kT == 0.0) return kInfiniteBeta;
  return 1.0 / kT;
}

SpectralDecomposition::SpectralDecomposition(std::shared_ptr<const BasisLayout> layout, std::vector<Block> blocks)
    : layout_(std::move(layout)), blocks_(std::move(blocks)) {
  for (std::uint32_t b = 0; b < blocks_.size(); ++b)
    for (std::uint32_t m = 0; m < blocks_[b].values.size(); ++m) order_.push_back({b, m});
  if (order_.empty()) throw Error(ErrorCode::InvalidInput, "empty spectrum");
  std::stable_sort(order_.begin(), order_.end(), [&](const Entry& x, const Entry& y) {
    return blocks_[x.block].values[x.index] < blocks_[y.block].values[y.index];
  });
  values_.reserve(order_.size());
  for (const Entry& e : order_) values_.push_back(blocks_[e.block].values[e.index]);
}

bool SpectralDecomposition::has_vectors() const noexcept {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return !b.vectors.empty(); });
}

int SpectralDecomposition::sector(std::size_t g) const noexcept {
  const Block& blk = blocks_[order_[g].block];
  if (blk.excitations >= 0) return blk.excitations;
  return blk.labels.empty() ? -1 : blk.labels[order_[g].index];
}

std::vector<double> SpectralDecomposition::eigenvector(std::size_t g) const {
  const Entry e = order_[g];
  const Block& blk = blocks_[e.block];
  if (blk.vectors.empty()) throw Error(ErrorCode::InvalidInput, "decomposition was built without eigenvectors");
  const auto& basis = layout_->blocks()[e.block].basis;
  const std::size_t d = basis.size();
  std::vector<double> full(layout_->dimension(), 0.0);
  for (std::size_t p = 0; p < d; ++p) full[basis[p]] = blk.vectors[p * d + e.index];
  return full;
}

std::size_t SpectralDecomposition::ground_degeneracy() const noexcept {
  const double lmin = values_.front();
  const double tol = kDegeneracyTolerance * std::max(1.0, std::abs(lmin));
  std::size_t count = 0;
  while (count < values_.size() && values_[count] - lmin < tol) ++count;
  return count;
}

SpectralDecomposition diagonalize(const HamiltonianMatrix& h, const DiagonalizeOptions& options) {
  const BasisLayout& layout = h.layout();
  std::vector<SpectralDecomposition::Block> blocks;
  blocks.reserve(h.block_count());
  for (std::size_t b = 0; b < h.block_count(); ++b) {
    const std::size_t d = h.block_dimension(b);
    linalg::SymmetricEigen eig = linalg::eigh(h.block(b), d, options.want_vectors);
    SpectralDecomposition::Block out;
    out.excitations = layout.blocks()[b].excitations;
    out.values = std::move(eig.values);
    out.vectors = std::move(eig.vectors);
    if (out.excitations < 0 && options.want_vectors) {
      // Dense block: label each vector by the popcount carrying its weight.
      const auto& basis = layout.blocks()[b].basis;
      out.labels.assign(d, -1);
      std::vector<double> by_count(static_cast<std::size_t>(layout.dipoles()) + 1);
      for (std::size_t m = 0; m < d; ++m) {
        std::fill(by_count.begin(), by_count.end(), 0.0);
        for (std::size_t p = 0; p < d; ++p) {
          const double a = out.vectors[p * d + m];
          by_count[std::popcount(basis[p])] += a * a;
        }
        const auto top = std::max_element(by_count.begin(), by_count.end());
        if (*top > 1.0 - 1e-10) out.labels[m] = static_cast<int>(top - by_count.begin());
      }
    }
    blocks.push_back(std::move(out));
  }
  return SpectralDecomposition(h.shared_layout(), std::move(blocks));
}

double PartitionFunction::log_z(double beta) const {
  if (std::isinf(beta)) return std::log(z);
  return std::log(z) - beta * shift;
}

PartitionFunction partition_function(const SpectralDecomposition& spec, double beta) {
  if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidInput, "inverse temperature must be non-negative");
  const double lmin = spec.ground_energy();
  if (std::isinf(beta)) return {static_cast<double>(spec.ground_degeneracy()), lmin};
  double z = 0.0;
  for (double e : spec.eigenvalues()) z += std::exp(-beta * (e - lmin));
  return {z, lmin};
}

ThermalState::ThermalState(std::shared_ptr<const SpectralDecomposition> spec, double beta)
    : spec_(std::move(spec)), beta_(beta), partition_(partition_function(*spec_, beta)) {
  const double lmin = partition_.shift;
  const double tol = kDegeneracyTolerance * std::max(1.0, std::abs(lmin));
  block_weights_.reserve(spec_->blocks().size());
  for (const auto& blk : spec_->blocks()) {
    std::vector<double> w(blk.values.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
      const double de = blk.values[m] - lmin;
      if (std::isinf(beta_)) {
        w[m] = de < tol ? 1.0 / partition_.z : 0.0;
      } else {
        w[m] = std::exp(-beta_ * de) / partition_.z;
      }
    }
    block_weights_.push_back(std::move(w));
  }
}

double ThermalState::weight(std::size_t g) const noexcept {
  return block_weights_[spec_->block_index(g)][spec_->index_in_block(g)];
}

double ThermalState::energy() const {
  double e = 0.0;
  for (std::size_t g = 0; g < spec_->size(); ++g) e += weight(g) * spec_->eigenvalue(g);
  return e;
}

ThermalState thermal_state(std::shared_ptr<const SpectralDecomposition> spec, double beta) {
  if (!spec) throw Error(ErrorCode::InvalidInput, "null decomposition");
  return ThermalState(std::move(spec), beta);
}

std::vector<std::vector<double>> ground_state(const SpectralDecomposition& spec) {
  std::vector<std::vector<double>> out;
  const std::size_t g = spec.ground_degeneracy();
  out.reserve(g);
  for (std::size_t i = 0; i < g; ++i) out.push_back(spec.eigenvector(i));
  return out;
}

}  // namespace dipswitch

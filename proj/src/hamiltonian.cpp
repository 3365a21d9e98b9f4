#include "dipswitch/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "dipswitch/error.hpp"

namespace dipswitch {

namespace {

void check_dipole_count(int n) {
  if (n < 1 || n > 30) throw Error(ErrorCode::InvalidInput, "dipole count must be in [1, 30]");
}

}  // namespace

std::vector<Mask> enumerate_sector(int n, int k) {
  check_dipole_count(n);
  if (k < 0 || k > n) {
    std::ostringstream msg;
    msg << "excitation count " << k << " out of range [0, " << n << "]";
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
  std::vector<Mask> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  // Gosper's hack walks same-popcount masks in increasing order.
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t m = (std::uint64_t{1} << k) - 1;
  while (m < limit) {
    out.push_back(static_cast<Mask>(m));
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

BasisLayout::BasisLayout(int n, std::vector<Block> blocks)
    : n_(n), blocks_(std::move(blocks)), block_of_(std::size_t{1} << n, -1), position_(std::size_t{1} << n, 0) {
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& basis = blocks_[b].basis;
    for (std::size_t p = 0; p < basis.size(); ++p) {
      block_of_[basis[p]] = static_cast<int>(b);
      position_[basis[p]] = static_cast<std::uint32_t>(p);
    }
  }
}

std::shared_ptr<const BasisLayout> BasisLayout::sectors(int n) {
  check_dipole_count(n);
  std::vector<Block> blocks;
  for (int k = 0; k <= n; ++k) blocks.push_back({k, enumerate_sector(n, k)});
  return std::shared_ptr<const BasisLayout>(new BasisLayout(n, std::move(blocks)));
}

std::shared_ptr<const BasisLayout> BasisLayout::single_sector(int n, int k) {
  std::vector<Block> blocks;
  blocks.push_back({k, enumerate_sector(n, k)});
  return std::shared_ptr<const BasisLayout>(new BasisLayout(n, std::move(blocks)));
}

std::shared_ptr<const BasisLayout> BasisLayout::dense(int n) {
  check_dipole_count(n);
  if (n > kMaxDenseDipoles) throw Error(ErrorCode::SizeLimit, "dense Hamiltonian limited to 14 dipoles");
  Block all{-1, std::vector<Mask>(std::size_t{1} << n)};
  for (std::size_t m = 0; m < all.basis.size(); ++m) all.basis[m] = static_cast<Mask>(m);
  std::vector<Block> blocks;
  blocks.push_back(std::move(all));
  return std::shared_ptr<const BasisLayout>(new BasisLayout(n, std::move(blocks)));
}

HamiltonianMatrix::HamiltonianMatrix(std::shared_ptr<const BasisLayout> layout, std::vector<double> omega,
                                     std::vector<std::vector<double>> blocks)
    : layout_(std::move(layout)), omega_(std::move(omega)), blocks_(std::move(blocks)) {}

std::vector<double> HamiltonianMatrix::to_dense() const {
  const std::size_t dim = layout_->dimension();
  std::vector<double> full(dim * dim, 0.0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& basis = layout_->blocks()[b].basis;
    const std::size_t d = basis.size();
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) full[basis[p] * dim + basis[q]] = blocks_[b][p * d + q];
  }
  return full;
}

HamiltonianMatrix build_hamiltonian(const CouplingMatrix& couplings, std::span<const double> omega,
                                    const HamiltonianOptions& options) {
  const int n = static_cast<int>(couplings.size());
  if (omega.size() != couplings.size()) {
    std::ostringstream msg;
    msg << "expected " << n << " transition frequencies, got " << omega.size();
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
  for (double w : omega) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidInput, "transition frequencies must be finite");
  }

  std::shared_ptr<const BasisLayout> layout;
  if (options.sector) {
    layout = BasisLayout::single_sector(n, *options.sector);
  } else {
    Representation rep = options.representation;
    if (rep == Representation::Auto) rep = n >= kSectorThreshold ? Representation::Sectors : Representation::Dense;
    layout = rep == Representation::Dense ? BasisLayout::dense(n) : BasisLayout::sectors(n);
  }

  std::vector<std::vector<double>> blocks;
  blocks.reserve(layout->blocks().size());
  for (const auto& blk : layout->blocks()) {
    const std::size_t d = blk.basis.size();
    std::vector<double> h(d * d, 0.0);
    for (std::size_t p = 0; p < d; ++p) {
      const Mask b = blk.basis[p];
      double diag = 0.0;
      for (int i = 0; i < n; ++i)
        if (b >> i & 1u) diag += omega[i];
      h[p * d + p] = diag;
      // One excitation hops between i and j when their occupations differ.
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (((b >> i) & 1u) == ((b >> j) & 1u)) continue;
          const double c = couplings(i, j);
          if (c == 0.0) continue;
          const Mask flipped = b ^ ((Mask{1} << i) | (Mask{1} << j));
          h[p * d + layout->position(flipped)] = c;
        }
      }
    }
    blocks.push_back(std::move(h));
  }
  return HamiltonianMatrix(std::move(layout), std::vector<double>(omega.begin(), omega.end()), std::move(blocks));
}

HamiltonianMatrix build_hamiltonian(const CouplingMatrix& couplings, double omega,
                                    const HamiltonianOptions& options) {
  const std::vector<double> uniform(couplings.size(), omega);
  return build_hamiltonian(couplings, uniform, options);
}

}  // namespace dipswitch

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dipswitch/geometry.hpp"

namespace dipswitch {

/// Standard-basis product state: bit i set means dipole i is excited
/// (oriented against the field).
using Mask = std::uint32_t;

/// All masks of n bits with exactly k set bits, ascending.
std::vector<Mask> enumerate_sector(int n, int k);

/// Partition of the 2^N basis into blocks. A sector layout has one block per
/// excitation count; the dense layout is a single block covering everything.
class BasisLayout {
 public:
  static std::shared_ptr<const BasisLayout> sectors(int n);
  static std::shared_ptr<const BasisLayout> single_sector(int n, int k);
  static std::shared_ptr<const BasisLayout> dense(int n);

  struct Block {
    int excitations;  ///< -1 for the dense block
    std::vector<Mask> basis;
  };

  int dipoles() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << n_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// Block holding `mask`, or -1 when the layout does not cover it.
  int block_of(Mask mask) const noexcept { return block_of_[mask]; }
  /// Index of `mask` within its block.
  std::uint32_t position(Mask mask) const noexcept { return position_[mask]; }

 private:
  BasisLayout(int n, std::vector<Block> blocks);

  int n_;
  std::vector<Block> blocks_;
  std::vector<int> block_of_;
  std::vector<std::uint32_t> position_;
};

enum class Representation { Auto, Dense, Sectors };

inline constexpr int kMaxDenseDipoles = 14;
/// Auto switches to sector blocks from this size on.
inline constexpr int kSectorThreshold = 8;

/// Real symmetric Hamiltonian in the standard basis, stored block by block
/// over a BasisLayout.
///
/// Energy convention: H = sum_i omega_i n_i + sum_{i<j} Omega_ij (S+_i S-_j + h.c.)
/// with n_i the excitation number of site i. This is the spin-z form shifted
/// by a constant so the all-ground state sits at exactly zero energy and the
/// two-dipole spectrum reads {0, w - W, w + W, 2w}.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(std::shared_ptr<const BasisLayout> layout, std::vector<double> omega,
                    std::vector<std::vector<double>> blocks);

  int dipoles() const noexcept { return layout_->dipoles(); }
  const BasisLayout& layout() const noexcept { return *layout_; }
  std::shared_ptr<const BasisLayout> shared_layout() const noexcept { return layout_; }
  const std::vector<double>& omega() const noexcept { return omega_; }

  std::size_t block_count() const noexcept { return blocks_.size(); }
  /// Row-major d x d matrix of block b.
  std::span<const double> block(std::size_t b) const noexcept { return blocks_[b]; }
  std::size_t block_dimension(std::size_t b) const noexcept { return layout_->blocks()[b].basis.size(); }

  /// Full 2^N x 2^N row-major matrix; blocks not covered by the layout are zero.
  std::vector<double> to_dense() const;

 private:
  std::shared_ptr<const BasisLayout> layout_;
  std::vector<double> omega_;
  std::vector<std::vector<double>> blocks_;
};

struct HamiltonianOptions {
  Representation representation = Representation::Auto;
  /// Restrict to a single excitation sector.
  std::optional<int> sector;
};

HamiltonianMatrix build_hamiltonian(const CouplingMatrix& couplings, std::span<const double> omega,
                                    const HamiltonianOptions& options = {});

/// Uniform transition frequency on every site.
HamiltonianMatrix build_hamiltonian(const CouplingMatrix& couplings, double omega,
                                    const HamiltonianOptions& options = {});

}  // namespace dipswitch

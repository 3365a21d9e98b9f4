#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "dipswitch/hamiltonian.hpp"

namespace dipswitch {

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Inverse temperature for kT in units of the reference coupling; kT = 0 maps
/// to kInfiniteBeta.
double beta_from_temperature(double kT);

/// Relative tolerance under which two eigenvalues count as degenerate:
/// |a - b| < kDegeneracyTolerance * max(1, |ground energy|).
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Eigenpairs of a HamiltonianMatrix, kept block by block over the same
/// BasisLayout. Global eigen index g runs over all blocks in ascending energy
/// (ties broken by block, then by in-block order).
class SpectralDecomposition {
 public:
  struct Block {
    int excitations;              ///< -1 for the dense block
    std::vector<double> values;   ///< ascending
    /// Row-major d x d: row p is basis position p, column m is eigenvector m.
    /// Empty when vectors were not requested.
    std::vector<double> vectors;
    std::vector<int> labels;      ///< excitation count per eigenvector, -1 if mixed
  };

  SpectralDecomposition(std::shared_ptr<const BasisLayout> layout, std::vector<Block> blocks);

  const BasisLayout& layout() const noexcept { return *layout_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  bool has_vectors() const noexcept;

  std::size_t size() const noexcept { return order_.size(); }
  double eigenvalue(std::size_t g) const noexcept { return values_[g]; }
  std::span<const double> eigenvalues() const noexcept { return values_; }
  double ground_energy() const noexcept { return values_.front(); }
  /// Excitation count of eigenpair g, -1 when it straddles sectors.
  int sector(std::size_t g) const noexcept;
  std::size_t block_index(std::size_t g) const noexcept { return order_[g].block; }
  std::size_t index_in_block(std::size_t g) const noexcept { return order_[g].index; }

  /// Eigenvector g embedded in the full 2^N standard basis.
  std::vector<double> eigenvector(std::size_t g) const;

  /// Number of eigenpairs within the degeneracy tolerance of the ground energy.
  std::size_t ground_degeneracy() const noexcept;

 private:
  struct Entry {
    std::uint32_t block;
    std::uint32_t index;
  };

  std::shared_ptr<const BasisLayout> layout_;
  std::vector<Block> blocks_;
  std::vector<Entry> order_;
  std::vector<double> values_;
};

struct DiagonalizeOptions {
  bool want_vectors = true;
};

SpectralDecomposition diagonalize(const HamiltonianMatrix& h, const DiagonalizeOptions& options = {});

/// Shifted partition function: z = sum_g exp(-beta (E_g - shift)) with
/// shift = ground energy, so log Z = log(z) - beta * shift.
struct PartitionFunction {
  double z;
  double shift;

  double log_z(double beta) const;
};

PartitionFunction partition_function(const SpectralDecomposition& spec, double beta);

/// Gibbs state kept in spectral form; the full density matrix is never built.
class ThermalState {
 public:
  ThermalState(std::shared_ptr<const SpectralDecomposition> spec, double beta);

  const SpectralDecomposition& decomposition() const noexcept { return *spec_; }
  double beta() const noexcept { return beta_; }
  const PartitionFunction& partition() const noexcept { return partition_; }

  /// Weight of global eigenpair g.
  double weight(std::size_t g) const noexcept;
  /// Weights of a block's eigenpairs in in-block order (non-increasing).
  std::span<const double> block_weights(std::size_t b) const noexcept { return block_weights_[b]; }

  /// sum_g w_g E_g
  double energy() const;

 private:
  std::shared_ptr<const SpectralDecomposition> spec_;
  double beta_;
  PartitionFunction partition_;
  std::vector<std::vector<double>> block_weights_;
};

ThermalState thermal_state(std::shared_ptr<const SpectralDecomposition> spec, double beta);

/// Every eigenvector within the degeneracy tolerance of the ground energy,
/// in the full standard basis.
std::vector<std::vector<double>> ground_state(const SpectralDecomposition& spec);

}  // namespace dipswitch

#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace hrb::rng {

/// Role of a derived random stream. Each (master seed, purpose, index pair)
/// triple names one stream; draws never cross streams, so results do not
/// depend on evaluation order or thread count.
enum class Purpose : std::uint64_t {
  kLeftFactor = 1,      // row-space orthonormal factor of the inputs
  kRightFactor = 2,     // column-space orthonormal factor of the inputs
  kTrueWeights = 3,     // target-generating weights (index = redraw counter)
  kInitialWeights = 4,  // per-trajectory initialization (index = trajectory)
  kMinibatchNoise = 5,  // per-(trajectory, step) gradient noise
  kCellTargets = 6,     // per-cell target draws in parameter sweeps
  kSweepConfig = 7,     // randomized configuration draws
};

/// SplitMix64 finalizer; also the per-stream generator step.
std::uint64_t mix64(std::uint64_t x);

/// Collapses (master, purpose, a, b) into one stream key.
std::uint64_t derive_key(std::uint64_t master, Purpose purpose,
                         std::uint64_t a = 0, std::uint64_t b = 0);

/// Deterministic random stream. A SplitMix64 sequence with Marsaglia-polar
/// normals; identical output on every platform for a given key.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}
  Stream(std::uint64_t master, Purpose purpose, std::uint64_t a = 0,
         std::uint64_t b = 0)
      : state_(derive_key(master, purpose, a, b)) {}

  std::uint64_t next_u64();
  /// Uniform draw on (0, 1].
  double next_unit();
  /// Standard normal draw.
  double next_normal();
  /// Vector of iid standard normals.
  Eigen::VectorXd normal_vector(Eigen::Index size);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hrb::rng

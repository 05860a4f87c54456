#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dipolar/config.hpp"
#include "dipolar/estimators.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/propagator.hpp"
#include "dipolar/rng.hpp"
#include "dipolar/trial.hpp"

namespace dipolar {

struct SamplerOptions {
  Backend backend = Backend::primitive;
  /// Bisection moves are made on segments of 2^1 .. 2^levels links.
  int bisection_levels = 3;
  /// Rigid single-rotor path rotations use angles uniform in [-max, max].
  double rotation_max_angle = 3.14159265358979323846;
  int n_grid = PropagatorTable::kDefaultGrid;
};

/// (links + 1) beads of N orientations, bead-major.
struct PathConfiguration {
  int links = 0;
  int rotors = 0;
  std::vector<Vec3> beads;

  PathConfiguration() = default;
  PathConfiguration(int links, int rotors) : links(links), rotors(rotors), beads((links + 1) * rotors) {}
  Vec3& at(int bead, int rotor) { return beads[static_cast<std::size_t>(bead) * rotors + rotor]; }
  const Vec3& at(int bead, int rotor) const { return beads[static_cast<std::size_t>(bead) * rotors + rotor]; }
  std::span<const Vec3> bead(int b) const { return {beads.data() + static_cast<std::size_t>(b) * rotors, std::size_t(rotors)}; }
  /// Path with bead order reversed.
  PathConfiguration reversed() const;
};

struct MoveCounter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct MoveStats {
  /// Index l - 1 for segments of 2^l links.
  std::vector<MoveCounter> bisection;
  MoveCounter end;
  MoveCounter rotation;
  /// MPE6 only: proposals whose step weight came out non-positive, out of
  /// all proposals that evaluated it.
  std::uint64_t negative_weight = 0;
  std::uint64_t weight_evaluations = 0;
  /// Bisection moves abandoned because a free-bridge draw exceeded the
  /// rejection budget (endpoints far out in the kernel tail).
  std::uint64_t bridge_stalls = 0;
  /// Midpoint-proposal draws whose target exceeded the envelope (should
  /// stay zero; a nonzero count means those draws were slightly biased).
  std::uint64_t envelope_violations = 0;

  double negative_fraction() const {
    return weight_evaluations ? static_cast<double>(negative_weight) / weight_evaluations : 0.0;
  }
};

/// Largest tolerated fraction of non-positive MPE6 step weights.
inline constexpr double kNegativeWeightLimit = 1e-3;

/// Rejection draws allowed for one free-bridge sample before the move is
/// abandoned. Reaching it needs an acceptance below 1e-6, i.e. endpoints
/// that are themselves a ~1e-6 tail event of the free measure.
inline constexpr long kBridgeBudget = 1'000'000;


/// Immutable data shared by all chains of one run: lattice, couplings,
/// trial function and kernel tables.
///
/// The sampled path always lives on the finest grid: M = beta / tau links
/// for the primitive backend, 4 beta / tau sub-links (groups of four per
/// step tau) for MPE6.
class PigsModel {
public:
  PigsModel(std::shared_ptr<const LatticeSystem> lattice, ReducedParams params, TrialWF trial,
            SamplerOptions options = {});

  const LatticeSystem& lattice() const { return *lattice_; }
  const ReducedParams& params() const { return params_; }
  const TrialWF& trial() const { return trial_; }
  const SamplerOptions& options() const { return options_; }
  int rotors() const { return lattice_->size(); }
  int links() const { return links_; }
  double sub_tau() const { return sub_tau_; }
  /// Bead at which diagonal observables are measured: M / 2, moved to the
  /// nearest preceding step boundary for MPE6.
  int middle_bead() const;
  /// Kernel at sub_tau * 2^level, for level < bisection_levels + kWideTables.
  const PropagatorTable& table(int level) const { return tables_.at(level); }
  int table_count() const { return static_cast<int>(tables_.size()); }
  /// Extra, wider tables kept as bridge proposals.
  static constexpr int kWideTables = 3;
  /// midpoint_envelope_limit(table(level), table(wide)), for level below
  /// bisection_levels and wide >= level.
  double midpoint_limit(int level, int wide) const { return midpoint_limits_.at(level).at(wide - level); }

  double bead_potential(std::span<const Vec3> bead) const;
  /// V(bead with rotor i set to n_new) - V(bead).
  double potential_change(std::span<const Vec3> bead, int rotor, const Vec3& n_new) const;
  /// log psi_T(X_0) + sum of log link weights + log psi_T(X_M), with the
  /// tabulated kernel. -infinity if an MPE6 step weight is not positive.
  double path_log_weight(const PathConfiguration& path) const;
  /// Mixed-estimator energy per particle averaged over both path ends.
  double end_energy(const PathConfiguration& path) const;

private:
  std::shared_ptr<const LatticeSystem> lattice_;
  ReducedParams params_;
  TrialWF trial_;
  SamplerOptions options_;
  int links_ = 0;
  double sub_tau_ = 0.0;
  std::vector<PropagatorTable> tables_;
  std::vector<std::vector<double>> midpoint_limits_;
};

/// One Markov chain over paths.
class Chain {
public:
  Chain(std::shared_ptr<const PigsModel> model, std::uint64_t seed, std::uint64_t stream);

  const PigsModel& model() const { return *model_; }
  const PathConfiguration& path() const { return path_; }
  /// Replaces the path (for tests and restarts); orientations are normalised.
  void set_path(PathConfiguration path);
  const MoveStats& stats() const { return stats_; }
  long sweeps() const { return sweeps_; }
  Rng& rng() { return rng_; }

  /// Per rotor: floor(M / 2^l) bisections at every level l, one move of each
  /// end bead and one rigid rotation of the rotor's whole path.
  void sweep();

  /// Regrows the interior of rotor `rotor` on beads start .. start + 2^level.
  bool bisection_move(int rotor, int start, int level);
  /// Resamples bead 0 (end = 0) or bead M (end = 1) of one rotor.
  bool end_move(int rotor, int end);
  /// Rotates every bead of one rotor by `angle` about `axis`.
  bool rotation_move(int rotor, const Vec3& axis, double angle);
  /// rotation_move about a uniformly random axis by a uniform angle.
  bool random_rotation_move(int rotor);

  double log_weight() const { return model_->path_log_weight(path_); }

  void write_state(std::ostream& out) const;
  void read_state(std::istream& in);

private:
  /// Change of sum log F over the MPE6 steps touching beads first..last
  /// when bead b's potential shifts by dv_[b]; NaN if a new weight is not
  /// positive.
  double mpe_log_ratio(int first, int last);
  void refresh_potentials();
  /// Exact draw from G(left . x) G(x . right) with G = table(level);
  /// nullopt once the rejection budget is spent.
  std::optional<Vec3> sample_bridge(const Vec3& left, const Vec3& right, int level);
  bool metropolis(double log_ratio);

  std::shared_ptr<const PigsModel> model_;
  Rng rng_;
  PathConfiguration path_;
  MoveStats stats_;
  long sweeps_ = 0;
  /// Total potential per bead, kept only for MPE6.
  std::vector<double> potentials_;
  std::vector<Vec3> trial_beads_;
  std::vector<double> dv_;
};

/// Everything a finished (or checkpointed) run produced.
struct PigsResult {
  PolarizationAccumulator accumulator;
  MoveStats stats;
  long sweeps = 0;
  double alpha = 0.0;
  bool backend_invalid = false;
};

/// Runs one chain of `config` on stream config.stream + chain. Measures after
/// every post-equilibration sweep. With a checkpoint path, resumes from an
/// existing checkpoint (refusing one written for another manifest) and
/// writes a new one every checkpoint_every sweeps and at the end.
PigsResult run_pigs(const RunConfig& config, int chain = 0, const std::function<void(long)>& progress = {});

/// The same measurement loop on an explicit model (clusters, tests), no
/// checkpointing.
PigsResult sample_chain(std::shared_ptr<const PigsModel> model, long equilibration_sweeps, long measurement_sweeps,
                        std::uint64_t seed, std::uint64_t stream = 0);
/// Shared model for a configuration (lattice built with the configured
/// convention and cutoff, Hartree exponent optimised at u).
std::shared_ptr<const PigsModel> make_model(const RunConfig& config);

} // namespace dipolar

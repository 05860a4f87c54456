#include "dipolar/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace dipolar {

namespace {

constexpr int kStateVersion = 1;

std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hex(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw IoError("malformed number '" + s + "' in checkpoint");
  return x;
}

void expect(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word)
    throw IoError("checkpoint: expected '" + word + "', found '" + w + "'");
}

template <class T> T read_value(std::istream& in) {
  T v{};
  if (!(in >> v))
    throw IoError("checkpoint: truncated");
  return v;
}

} // namespace

PathConfiguration PathConfiguration::reversed() const {
  PathConfiguration r(links, rotors);
  for (int b = 0; b <= links; ++b)
    for (int i = 0; i < rotors; ++i)
      r.at(b, i) = at(links - b, i);
  return r;
}

PigsModel::PigsModel(std::shared_ptr<const LatticeSystem> lattice, ReducedParams params, TrialWF trial,
                     SamplerOptions options)
    : lattice_(std::move(lattice)), params_(params), trial_(trial), options_(options) {
  params_.validate();
  const int steps = params_.links();
  if (options_.backend == Backend::mpe6) {
    links_ = 4 * steps;
    sub_tau_ = 0.25 * params_.tau;
  } else {
    if (steps % 2 != 0)
      throw ConfigError("beta / tau must be even so that a middle bead exists");
    links_ = steps;
    sub_tau_ = params_.tau;
  }
  if (options_.bisection_levels < 1)
    throw ConfigError("at least one bisection level is required");
  for (int level = 0; level < options_.bisection_levels + kWideTables; ++level)
    tables_.emplace_back(sub_tau_ * (1 << level), options_.n_grid);
  midpoint_limits_.resize(options_.bisection_levels);
  for (int level = 0; level < options_.bisection_levels; ++level)
    for (int wide = level; wide < table_count(); ++wide)
      midpoint_limits_[level].push_back(midpoint_envelope_limit(tables_[level], tables_[wide]));
}

int PigsModel::middle_bead() const {
  if (options_.backend == Backend::mpe6)
    return 4 * ((links_ / 4) / 2);
  return links_ / 2;
}

double PigsModel::bead_potential(std::span<const Vec3> bead) const {
  return total_potential(bead, *lattice_, params_.u, params_.g);
}

double PigsModel::potential_change(std::span<const Vec3> bead, int rotor, const Vec3& n_new) const {
  const Vec3& n_old = bead[rotor];
  const Vec3 d = n_new - n_old;
  const int n = rotors();
  Vec3 h = Vec3::Zero();
  for (int j = 0; j < n; ++j)
    if (j != rotor)
      h.noalias() += lattice_->tensor(rotor, j) * bead[j];
  const Mat3& self = lattice_->tensor(rotor, rotor);
  const double pair = d.dot(h) + 0.5 * (n_new.dot(self * n_new) - n_old.dot(self * n_old));
  return -params_.u * d.dot(field_axis()) + params_.g * pair;
}

double PigsModel::path_log_weight(const PathConfiguration& path) const {
  if (path.links != links_ || path.rotors != rotors())
    throw DomainError("path shape does not match the model");
  double logw = evaluate_log(trial_, path.bead(0)) + evaluate_log(trial_, path.bead(links_));
  const auto& kernel = tables_.front();
  for (int b = 0; b < links_; ++b)
    for (int i = 0; i < path.rotors; ++i)
      logw += std::log(kernel(path.at(b, i).dot(path.at(b + 1, i))));
  std::vector<double> v(links_ + 1);
  for (int b = 0; b <= links_; ++b)
    v[b] = bead_potential(path.bead(b));
  if (options_.backend == Backend::primitive) {
    double action = 0.5 * (v.front() + v.back());
    for (int b = 1; b < links_; ++b)
      action += v[b];
    return logw - sub_tau_ * action;
  }
  for (int step = 0; step < links_ / 4; ++step) {
    const auto f = mpe6_potential_factor(std::span<const double, 5>(v.data() + 4 * step, 5), params_.tau);
    if (f.sign <= 0.0)
      return -std::numeric_limits<double>::infinity();
    logw += f.log_abs;
  }
  return logw;
}

double PigsModel::end_energy(const PathConfiguration& path) const {
  const double e0 = local_energy(trial_, path.bead(0), *lattice_, params_.u, params_.g);
  const double e1 = local_energy(trial_, path.bead(links_), *lattice_, params_.u, params_.g);
  return 0.5 * (e0 + e1) / rotors();
}

Chain::Chain(std::shared_ptr<const PigsModel> model, std::uint64_t seed, std::uint64_t stream)
    : model_(std::move(model)), rng_(seed, stream), path_(model_->links(), model_->rotors()) {
  stats_.bisection.resize(model_->options().bisection_levels);
  // Each rotor starts as a rigid path at a random orientation.
  for (int i = 0; i < path_.rotors; ++i) {
    const double z = 2.0 * rng_.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng_.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 n(s * std::cos(phi), s * std::sin(phi), z);
    for (int b = 0; b <= path_.links; ++b)
      path_.at(b, i) = n;
  }
  dv_.assign(path_.links + 1, 0.0);
  refresh_potentials();
}

void Chain::set_path(PathConfiguration path) {
  if (path.links != model_->links() || path.rotors != model_->rotors())
    throw DomainError("path shape does not match the model");
  for (auto& n : path.beads) {
    const double norm = n.norm();
    if (!(norm > 0.0))
      throw DomainError("zero orientation vector");
    n /= norm;
  }
  path_ = std::move(path);
  refresh_potentials();
}

void Chain::refresh_potentials() {
  potentials_.clear();
  if (model_->options().backend != Backend::mpe6)
    return;
  potentials_.resize(path_.links + 1);
  for (int b = 0; b <= path_.links; ++b)
    potentials_[b] = model_->bead_potential(path_.bead(b));
}

bool Chain::metropolis(double log_ratio) {
  if (std::isnan(log_ratio))
    return false;
  if (log_ratio >= 0.0)
    return true;
  return rng_.uniform() < std::exp(log_ratio);
}

constexpr int kEnvelopeScanPolar = 180;
constexpr int kEnvelopeScanAzimuth = 24;
constexpr double kScanRate = 2.5e-4;

std::optional<Vec3> Chain::sample_bridge(const Vec3& left, const Vec3& right, int level) {
  // Three exact rejection samplers for G(left . x) G(x . right), picked by
  // expected acceptance:
  //  - propose G(left . x), accept G(x . right) / peak; acceptance is
  //    G_2t(left . right) / peak, read off the next table;
  //  - propose a table at t' >= t around the midpoint with the envelope
  //    certified by midpoint_limit; acceptance about t / 2t';
  //  - far tail only: midpoint proposal from the widest table with an
  //    envelope scanned on the fly.
  const auto& table = model_->table(level);
  const double c = std::clamp(left.dot(right), -1.0, 1.0);
  const double d = std::acos(c);
  const double left_rate = model_->table(level + 1)(c) / table.peak();
  int wide = -1;
  for (int j = level; j < model_->table_count(); ++j) {
    if (d < model_->midpoint_limit(level, j)) {
      if (left_rate < std::ldexp(0.5, level - j))
        wide = j;
      break;
    }
  }
  if (wide < 0 && left_rate > kScanRate) {
    const double peak = table.peak();
    for (long tries = 0; tries < kBridgeBudget; ++tries) {
      const Vec3 x = table.sample_around(left, rng_);
      if (rng_.uniform() * peak < table(x.dot(right)))
        return x;
    }
    ++stats_.bridge_stalls;
    return std::nullopt;
  }

  if (wide >= 0) {
    const auto& proposal = model_->table(wide);
    const Vec3 mid = (left + right).normalized();
    const double fm = table(mid.dot(left));
    const double bound = fm * fm / proposal.peak();
    for (long tries = 0; tries < kBridgeBudget; ++tries) {
      const Vec3 x = proposal.sample_around(mid, rng_);
      const double w = table(x.dot(left)) * table(x.dot(right)) / proposal(x.dot(mid));
      if (w > bound * (1.0 + 1e-9))
        ++stats_.envelope_violations;
      if (rng_.uniform() * bound < w)
        return x;
    }
    ++stats_.bridge_stalls;
    return std::nullopt;
  }

  // Endpoints far out in the tail: envelope from a grid scan of the ratio,
  // padded by a factor 2.
  const auto& proposal = model_->table(model_->table_count() - 1);
  Vec3 mid = left + right;
  if (mid.norm() < 1e-8)
    mid = orient_about(left, 0.0, 0.0);
  mid.normalize();
  const auto ratio = [&](const Vec3& x) {
    return table(x.dot(left)) * table(x.dot(right)) / proposal(x.dot(mid));
  };
  double bound = 0.0;
  for (int a = 0; a <= kEnvelopeScanPolar; ++a) {
    const double cos_theta = std::cos(std::numbers::pi * a / kEnvelopeScanPolar);
    for (int b = 0; b < kEnvelopeScanAzimuth; ++b)
      bound = std::max(bound, ratio(orient_about(mid, cos_theta, 2.0 * std::numbers::pi * b / kEnvelopeScanAzimuth)));
  }
  bound *= 2.0;
  for (long tries = 0; tries < kBridgeBudget; ++tries) {
    const Vec3 x = proposal.sample_around(mid, rng_);
    const double w = ratio(x);
    if (w > bound)
      ++stats_.envelope_violations;
    if (rng_.uniform() * bound < w)
      return x;
  }
  ++stats_.bridge_stalls;
  return std::nullopt;
}

double Chain::mpe_log_ratio(int first, int last) {
  const int steps = path_.links / 4;
  const int s_first = std::max(0, (first - 1) / 4);
  const int s_last = std::min(steps - 1, last / 4);
  const double tau = model_->params().tau;
  double total = 0.0;
  bool negative = false;
  for (int s = s_first; s <= s_last; ++s) {
    std::array<double, 5> v_old{}, v_new{};
    for (int t = 0; t < 5; ++t) {
      v_old[t] = potentials_[4 * s + t];
      v_new[t] = v_old[t] + dv_[4 * s + t];
    }
    const auto f_old = mpe6_potential_factor(v_old, tau);
    const auto f_new = mpe6_potential_factor(v_new, tau);
    if (f_new.sign <= 0.0)
      negative = true;
    else
      total += f_new.log_abs - f_old.log_abs;
  }
  ++stats_.weight_evaluations;
  if (negative) {
    ++stats_.negative_weight;
    return std::numeric_limits<double>::quiet_NaN();
  }
  return total;
}

bool Chain::bisection_move(int rotor, int start, int level) {
  const int span = 1 << level;
  if (level < 1 || level > model_->options().bisection_levels || start < 0 || start + span > path_.links)
    throw DomainError("bisection segment outside the path");
  auto& counter = stats_.bisection[level - 1];
  ++counter.proposed;

  const bool mpe = model_->options().backend == Backend::mpe6;
  const double sub_tau = model_->sub_tau();
  trial_beads_.resize(span + 1);
  for (int p = 0; p <= span; ++p)
    trial_beads_[p] = path_.at(start + p, rotor);

  double previous = 0.0;
  bool accepted = true;
  for (int k = level; k >= 1 && accepted; --k) {
    const int h = 1 << (k - 1);
    for (int p = h; p < span; p += 2 * h) {
      const auto x = sample_bridge(trial_beads_[p - h], trial_beads_[p + h], k - 1);
      if (!x) {
        accepted = false;
        break;
      }
      trial_beads_[p] = *x;
      dv_[start + p] = model_->potential_change(path_.bead(start + p), rotor, trial_beads_[p]);
    }
    if (!accepted)
      break;
    double stage;
    if (k > 1 || !mpe) {
      double sum = 0.0;
      for (int p = h; p < span; p += h)
        sum += dv_[start + p];
      stage = -h * sub_tau * sum;
    } else {
      stage = mpe_log_ratio(start + 1, start + span - 1);
    }
    accepted = metropolis(stage - previous);
    previous = stage;
  }

  if (accepted) {
    for (int p = 1; p < span; ++p) {
      path_.at(start + p, rotor) = trial_beads_[p];
      if (mpe)
        potentials_[start + p] += dv_[start + p];
    }
    ++counter.accepted;
  }
  for (int p = 1; p < span; ++p)
    dv_[start + p] = 0.0;
  return accepted;
}

bool Chain::end_move(int rotor, int end) {
  if (end != 0 && end != 1)
    throw DomainError("end must be 0 or 1");
  ++stats_.end.proposed;
  const int b = end == 0 ? 0 : path_.links;
  const int nb = end == 0 ? 1 : path_.links - 1;
  const Vec3 n_new = model_->table(0).sample_around(path_.at(nb, rotor), rng_);
  const Vec3& n_old = path_.at(b, rotor);
  const double dv = model_->potential_change(path_.bead(b), rotor, n_new);
  const double dlog_psi = model_->trial().exponent() * (n_new - n_old).dot(field_axis());
  double action;
  const bool mpe = model_->options().backend == Backend::mpe6;
  if (mpe) {
    dv_[b] = dv;
    action = mpe_log_ratio(b, b);
    dv_[b] = 0.0;
  } else {
    action = -0.5 * model_->sub_tau() * dv;
  }
  if (!metropolis(dlog_psi + action))
    return false;
  path_.at(b, rotor) = n_new;
  if (mpe)
    potentials_[b] += dv;
  ++stats_.end.accepted;
  return true;
}

bool Chain::rotation_move(int rotor, const Vec3& axis, double angle) {
  ++stats_.rotation.proposed;
  const Eigen::AngleAxisd rotation(angle, axis.normalized());
  const Mat3 r = rotation.toRotationMatrix();
  const int m = path_.links;
  trial_beads_.resize(m + 1);
  for (int b = 0; b <= m; ++b) {
    trial_beads_[b] = (r * path_.at(b, rotor)).normalized();
    dv_[b] = model_->potential_change(path_.bead(b), rotor, trial_beads_[b]);
  }
  const double dlog_psi = model_->trial().exponent() *
                          (trial_beads_[0] - path_.at(0, rotor) + trial_beads_[m] - path_.at(m, rotor)).dot(field_axis());
  const bool mpe = model_->options().backend == Backend::mpe6;
  double action;
  if (mpe) {
    action = mpe_log_ratio(0, m);
  } else {
    double sum = 0.5 * (dv_[0] + dv_[m]);
    for (int b = 1; b < m; ++b)
      sum += dv_[b];
    action = -model_->sub_tau() * sum;
  }
  const bool accepted = metropolis(dlog_psi + action);
  if (accepted) {
    for (int b = 0; b <= m; ++b) {
      path_.at(b, rotor) = trial_beads_[b];
      if (mpe)
        potentials_[b] += dv_[b];
    }
    ++stats_.rotation.accepted;
  }
  std::fill(dv_.begin(), dv_.end(), 0.0);
  return accepted;
}

bool Chain::random_rotation_move(int rotor) {
  const double z = 2.0 * rng_.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng_.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vec3 axis(s * std::cos(phi), s * std::sin(phi), z);
  const double angle = (2.0 * rng_.uniform() - 1.0) * model_->options().rotation_max_angle;
  return rotation_move(rotor, axis, angle);
}

void Chain::sweep() {
  refresh_potentials();
  const int m = path_.links;
  for (int i = 0; i < path_.rotors; ++i) {
    for (int level = 1; level <= model_->options().bisection_levels; ++level) {
      const int span = 1 << level;
      if (span > m)
        break;
      const int moves = m / span;
      for (int k = 0; k < moves; ++k)
        bisection_move(i, static_cast<int>(rng_.below(m - span + 1)), level);
    }
    end_move(i, 0);
    end_move(i, 1);
    random_rotation_move(i);
  }
  ++sweeps_;
}

void Chain::write_state(std::ostream& out) const {
  out << "chain-state " << kStateVersion << '\n';
  out << "rotors " << path_.rotors << " links " << path_.links << " sweeps " << sweeps_ << '\n';
  out << "rng " << rng_.state() << '\n';
  out << "bisection " << stats_.bisection.size();
  for (const auto& c : stats_.bisection)
    out << ' ' << c.proposed << ' ' << c.accepted;
  out << '\n';
  out << "end " << stats_.end.proposed << ' ' << stats_.end.accepted << '\n';
  out << "rotation " << stats_.rotation.proposed << ' ' << stats_.rotation.accepted << '\n';
  out << "weights " << stats_.negative_weight << ' ' << stats_.weight_evaluations << ' ' << stats_.bridge_stalls << ' '
      << stats_.envelope_violations << '\n';
  out << "beads\n";
  for (const auto& n : path_.beads)
    out << hex(n.x()) << ' ' << hex(n.y()) << ' ' << hex(n.z()) << '\n';
  out << "end-chain\n";
}

void Chain::read_state(std::istream& in) {
  expect(in, "chain-state");
  if (read_value<int>(in) != kStateVersion)
    throw IoError("unsupported chain state version");
  expect(in, "rotors");
  const int rotors = read_value<int>(in);
  expect(in, "links");
  const int links = read_value<int>(in);
  expect(in, "sweeps");
  const long sweeps = read_value<long>(in);
  if (rotors != model_->rotors() || links != model_->links())
    throw ConfigError("checkpoint path shape does not match the configuration");
  expect(in, "rng");
  std::string rng_line;
  std::getline(in, rng_line);
  MoveStats stats;
  expect(in, "bisection");
  const auto levels = read_value<std::size_t>(in);
  if (levels != stats_.bisection.size())
    throw ConfigError("checkpoint bisection levels do not match the configuration");
  stats.bisection.resize(levels);
  for (auto& c : stats.bisection) {
    c.proposed = read_value<std::uint64_t>(in);
    c.accepted = read_value<std::uint64_t>(in);
  }
  expect(in, "end");
  stats.end.proposed = read_value<std::uint64_t>(in);
  stats.end.accepted = read_value<std::uint64_t>(in);
  expect(in, "rotation");
  stats.rotation.proposed = read_value<std::uint64_t>(in);
  stats.rotation.accepted = read_value<std::uint64_t>(in);
  expect(in, "weights");
  stats.negative_weight = read_value<std::uint64_t>(in);
  stats.weight_evaluations = read_value<std::uint64_t>(in);
  stats.bridge_stalls = read_value<std::uint64_t>(in);
  stats.envelope_violations = read_value<std::uint64_t>(in);
  expect(in, "beads");
  PathConfiguration path(links, rotors);
  for (auto& n : path.beads) {
    const auto x = parse_hex(read_value<std::string>(in));
    const auto y = parse_hex(read_value<std::string>(in));
    const auto z = parse_hex(read_value<std::string>(in));
    n = Vec3(x, y, z);
  }
  expect(in, "end-chain");
  rng_.restore(rng_line);
  path_ = std::move(path);
  stats_ = std::move(stats);
  sweeps_ = sweeps;
  refresh_potentials();
}

std::shared_ptr<const PigsModel> make_model(const RunConfig& config) {
  config.validate();
  auto lattice = std::make_shared<const LatticeSystem>(
      build_lattice(config.geometry, config.n, config.convention, config.cutoff, config.params.g));
  SamplerOptions options;
  options.backend = config.backend;
  options.bisection_levels = config.bisection_levels;
  options.rotation_max_angle = config.rotation_max_angle;
  options.n_grid = config.n_grid;
  return std::make_shared<const PigsModel>(lattice, config.params, make_trial(config.trial, config.params.u), options);
}

namespace {

constexpr const char* kCheckpointMagic = "dipolar-checkpoint";

std::string chain_checkpoint_path(const RunConfig& config, int chain) {
  if (config.chains == 1)
    return config.checkpoint_path;
  return config.checkpoint_path + ".chain" + std::to_string(chain);
}

void write_checkpoint(const std::string& path, std::uint64_t manifest, const Chain& chain,
                      const PolarizationAccumulator& acc) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out)
      throw IoError("cannot write checkpoint '" + tmp + "'");
    out << kCheckpointMagic << ' ' << kStateVersion << '\n';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(manifest));
    out << "manifest " << buf << '\n';
    chain.write_state(out);
    for (const auto* s : acc.all()) {
      out << "series " << s->name << ' ' << s->values.size() << '\n';
      for (double v : s->values)
        out << hex(v) << '\n';
    }
    out << "end-checkpoint\n";
    if (!out)
      throw IoError("failed writing checkpoint '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move checkpoint into place: " + ec.message());
}

void read_checkpoint(const std::string& path, std::uint64_t manifest, Chain& chain, PolarizationAccumulator& acc) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read checkpoint '" + path + "'");
  expect(in, kCheckpointMagic);
  if (read_value<int>(in) != kStateVersion)
    throw IoError("unsupported checkpoint version");
  expect(in, "manifest");
  const auto stored = std::stoull(read_value<std::string>(in), nullptr, 16);
  if (stored != manifest)
    throw ConfigError("checkpoint '" + path + "' was written for a different run manifest; refusing to resume");
  chain.read_state(in);
  for (auto* s : acc.all()) {
    expect(in, "series");
    expect(in, s->name);
    const auto count = read_value<std::size_t>(in);
    s->values.resize(count);
    for (auto& v : s->values)
      v = parse_hex(read_value<std::string>(in));
  }
  expect(in, "end-checkpoint");
}

} // namespace

PigsResult sample_chain(std::shared_ptr<const PigsModel> model, long equilibration_sweeps, long measurement_sweeps,
                        std::uint64_t seed, std::uint64_t stream) {
  Chain chain(model, seed, stream);
  PigsResult result;
  result.alpha = model->trial().exponent();
  result.accumulator.square = model->lattice().geometry == Geometry::square && model->lattice().convention != Convention::open;
  const int middle = model->middle_bead();
  const auto& p = model->params();
  for (long s = 0; s < equilibration_sweeps + measurement_sweeps; ++s) {
    chain.sweep();
    if (s >= equilibration_sweeps)
      result.accumulator.add(observe(chain.path().bead(middle), model->lattice(), p.u, p.g),
                             model->end_energy(chain.path()));
  }
  result.stats = chain.stats();
  result.sweeps = chain.sweeps();
  result.backend_invalid =
      model->options().backend == Backend::mpe6 && result.stats.negative_fraction() > kNegativeWeightLimit;
  return result;
}

PigsResult run_pigs(const RunConfig& config, int chain_index, const std::function<void(long)>& progress) {
  const auto model = make_model(config);
  Chain chain(model, config.seed, config.stream + static_cast<std::uint64_t>(chain_index));
  PigsResult result;
  result.alpha = model->trial().exponent();
  result.accumulator.square = config.geometry == Geometry::square;

  const std::uint64_t manifest = manifest_hash(config);
  const std::string checkpoint = config.checkpoint_path.empty() ? std::string() : chain_checkpoint_path(config, chain_index);
  if (!checkpoint.empty() && std::filesystem::exists(checkpoint))
    read_checkpoint(checkpoint, manifest, chain, result.accumulator);

  const long total = config.equilibration_sweeps + config.measurement_sweeps;
  const int middle = model->middle_bead();
  while (chain.sweeps() < total) {
    chain.sweep();
    const long done = chain.sweeps();
    if (done > config.equilibration_sweeps) {
      const auto& path = chain.path();
      result.accumulator.add(observe(path.bead(middle), model->lattice(), config.params.u, config.params.g),
                             model->end_energy(path));
    }
    if (!checkpoint.empty() && config.checkpoint_every > 0 && done % config.checkpoint_every == 0)
      write_checkpoint(checkpoint, manifest, chain, result.accumulator);
    if (progress)
      progress(done);
  }
  if (!checkpoint.empty())
    write_checkpoint(checkpoint, manifest, chain, result.accumulator);

  result.stats = chain.stats();
  result.sweeps = chain.sweeps();
  result.backend_invalid =
      config.backend == Backend::mpe6 && result.stats.negative_fraction() > kNegativeWeightLimit;
  return result;
}

} // namespace dipolar

#include "smsd/dict_learning.hpp"

#include "smsd/error.hpp"
#include "smsd/patch_pipeline.hpp"
#include "smsd/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace smsd {

void AtomUsage::record(const SparseCodeBatch& codes) {
  for (const SparseCode& c : codes.columns) {
    for (Index j : c.support) ++counts[static_cast<std::size_t>(j)];
  }
  signals_coded += codes.column_count();
}

void AtomUsage::reset(std::int64_t iteration) {
  std::fill(counts.begin(), counts.end(), 0);
  last_reset_iteration = iteration;
  signals_coded = 0;
}

std::vector<Index> AtomUsage::unused() const {
  std::vector<Index> out;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) out.push_back(static_cast<Index>(j));
  }
  return out;
}

SurrogateStats update_stats(const SurrogateStats& stats, const SparseCodeBatch& codes,
                            const Matrix& batch, std::int64_t t, double rho, Index eta) {
  if (t < 1) throw InvalidInput("update_stats: t must be >= 1");
  if (eta < 1 || codes.column_count() != eta || batch.cols() != eta) {
    throw InvalidInput("update_stats: codes and batch must both have eta columns");
  }
  if (batch.rows() != stats.b.rows() || codes.atom_count != stats.a.rows()) {
    throw InvalidInput("update_stats: shape mismatch with the statistics");
  }
  const double forget =
      rho == 0.0 ? 1.0 : std::pow(1.0 - 1.0 / static_cast<double>(t), rho);
  const double inv_eta = 1.0 / static_cast<double>(eta);

  SurrogateStats out{forget * stats.a, forget * stats.b, t};
  for (Index k = 0; k < eta; ++k) {
    const SparseCode& c = codes.columns[static_cast<std::size_t>(k)];
    for (std::size_t p = 0; p < c.support.size(); ++p) {
      const double vp = c.values[p] * inv_eta;
      for (std::size_t q = 0; q < c.support.size(); ++q) {
        out.a(c.support[p], c.support[q]) += vp * c.values[q];
      }
      out.b.col(c.support[p]) += vp * batch.col(k);
    }
  }
  return out;
}

namespace {

// Omega * M without forming Omega.
Matrix apply_omega(const Matrix& m, const Matrix& phi, double gamma) {
  Matrix out = m;
  if (phi.rows() > 0) out.noalias() += (phi.transpose() * (phi * m)) / gamma;
  return out;
}

void check_surrogate_shapes(const Matrix& psi, const SurrogateStats& stats, const Matrix& phi,
                            double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("surrogate: gamma must be positive");
  if (stats.a.rows() != psi.cols() || stats.a.cols() != psi.cols() ||
      stats.b.rows() != psi.rows() || stats.b.cols() != psi.cols() ||
      phi.cols() != psi.rows()) {
    throw InvalidInput("surrogate: shape mismatch");
  }
}

}  // namespace

double surrogate_value(const Matrix& psi, const SurrogateStats& stats, const Matrix& phi,
                       double gamma) {
  check_surrogate_shapes(psi, stats, phi, gamma);
  const Matrix omega_psi = apply_omega(psi, phi, gamma);
  const Matrix quad = psi.transpose() * omega_psi;
  return 0.5 * quad.cwiseProduct(stats.a.transpose()).sum() -
         omega_psi.cwiseProduct(stats.b).sum();
}

Vector surrogate_gradient_column(const Matrix& psi, const SurrogateStats& stats,
                                 const Matrix& phi, double gamma, Index j) {
  check_surrogate_shapes(psi, stats, phi, gamma);
  if (j < 0 || j >= psi.cols()) throw InvalidInput("surrogate_gradient_column: bad index");
  const Vector psi_a = psi * stats.a.col(j);
  const Vector b = stats.b.col(j);
  Vector g = psi_a - b;
  if (phi.rows() > 0) {
    const Matrix ptp = phi.transpose() * phi;
    g += (ptp * psi_a) / gamma - (ptp * b) / gamma;
  }
  return g;
}

namespace detail {

double usage_threshold(const SurrogateStats& stats) {
  const Index l = stats.a.rows();
  return l > 0 ? 1e-10 * stats.a.trace() / static_cast<double>(l) : 0.0;
}

std::optional<Vector> column_candidate(const Matrix& psi, const SurrogateStats& stats,
                                       Index j, UpdateMode mode, double gamma,
                                       const XiMatrices* xi) {
  const double ajj = stats.a(j, j);
  if (!(ajj > usage_threshold(stats)) || ajj <= 0.0) return std::nullopt;
  const Vector psi_a = psi * stats.a.col(j);
  const auto b = stats.b.col(j);
  const auto psi_j = psi.col(j);
  if (mode == UpdateMode::fixed_point) {
    return Vector(psi_j + (b - psi_a) / ajj);
  }
  if (!xi) throw InvalidInput("literal-paper update needs the Xi matrices");
  const Vector first = (b - psi_a) / ajj + psi_j;
  const Vector second = b / (ajj * gamma) + psi_j / gamma - psi_a / ajj;
  return Vector(xi->xi1 * first + xi->xi2 * second);
}

std::vector<Index> update_columns(Matrix& psi, const SurrogateStats& stats, Index passes,
                                  UpdateMode mode, double gamma, const XiMatrices* xi,
                                  ColumnProjection projection) {
  if (passes < 1) throw InvalidInput("dictionary_update: passes must be >= 1");
  std::vector<char> stale(static_cast<std::size_t>(psi.cols()), 0);
  for (Index pass = 0; pass < passes; ++pass) {
    for (Index j = 0; j < psi.cols(); ++j) {
      const auto u = column_candidate(psi, stats, j, mode, gamma, xi);
      const double norm = u ? u->norm() : 0.0;
      if (!u || norm < 1e-12 || !std::isfinite(norm)) {
        stale[static_cast<std::size_t>(j)] = 1;
        continue;
      }
      stale[static_cast<std::size_t>(j)] = 0;
      const double scale =
          projection == ColumnProjection::unit_sphere ? norm : std::max(norm, 1.0);
      psi.col(j) = *u / scale;
    }
  }
  std::vector<Index> out;
  for (std::size_t j = 0; j < stale.size(); ++j) {
    if (stale[j]) out.push_back(static_cast<Index>(j));
  }
  return out;
}

}  // namespace detail

DictUpdateResult dictionary_update(const Dictionary& psi, const SurrogateStats& stats,
                                   const SensingDesign& design, double gamma, Index passes,
                                   UpdateMode mode, const XiMatrices* xi) {
  check_surrogate_shapes(psi.atoms(), stats, design.phi, gamma);
  std::optional<XiMatrices> local;
  if (mode == UpdateMode::literal_paper && !xi) {
    local = xi_matrices(design, gamma);
    xi = &*local;
  }
  Matrix atoms = psi.atoms();
  auto stale = detail::update_columns(atoms, stats, passes, mode, gamma, xi,
                                      detail::ColumnProjection::unit_sphere);
  return {Dictionary(std::move(atoms)), std::move(stale)};
}

ReplacementResult replace_unused_atoms(const Dictionary& psi, AtomUsage& usage,
                                       const Matrix& pool, std::mt19937_64& rng,
                                       const std::vector<Index>& stale,
                                       std::int64_t iteration) {
  if (pool.cols() < 1) throw InvalidInput("replace_unused_atoms: empty training pool");
  if (pool.rows() != psi.signal_dim()) {
    throw InvalidInput("replace_unused_atoms: pool rows do not match the dictionary");
  }
  std::vector<char> target(static_cast<std::size_t>(psi.atom_count()), 0);
  for (Index j : usage.unused()) target[static_cast<std::size_t>(j)] = 1;
  for (Index j : stale) target[static_cast<std::size_t>(j)] = 1;

  constexpr int kMaxDraws = 100;
  std::uniform_int_distribution<Index> pick(0, pool.cols() - 1);
  Matrix atoms = psi.atoms();
  ReplacementResult r;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (!target[j]) continue;
    bool done = false;
    for (int draw = 0; draw < kMaxDraws && !done; ++draw) {
      const auto col = pool.col(pick(rng));
      const double n = col.norm();
      if (n < 1e-12) continue;
      atoms.col(static_cast<Index>(j)) = col / n;
      done = true;
    }
    if (!done) {
      throw InvalidInput("replace_unused_atoms: no usable training column after " +
                         std::to_string(kMaxDraws) + " draws");
    }
    r.replaced.push_back(static_cast<Index>(j));
  }
  usage.reset(iteration);
  r.dictionary = Dictionary(std::move(atoms));
  return r;
}

void Diagnostics::push(std::int64_t it, double objective, double diff, Index replaced) {
  iteration.push_back(it);
  batch_objective.push_back(objective);
  dict_diff.push_back(diff);
  atoms_replaced.push_back(replaced);
}

void Diagnostics::append(const Diagnostics& other, std::int64_t iteration_offset) {
  for (std::size_t i = 0; i < other.size(); ++i) {
    push(other.iteration[i] + iteration_offset, other.batch_objective[i], other.dict_diff[i],
         other.atoms_replaced[i]);
  }
}

void Diagnostics::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,batchObjective,dictDiff,atomsReplaced\n" << std::setprecision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    out << iteration[i] << ',' << batch_objective[i] << ',' << dict_diff[i] << ','
        << atoms_replaced[i] << '\n';
  }
}

Diagnostics Diagnostics::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Diagnostics d;
  std::string line;
  std::getline(in, line);
  if (line.rfind("iteration,batchObjective,dictDiff,atomsReplaced", 0) != 0) {
    throw FormatError(0, "unexpected diagnostics header in " + path.string());
  }
  std::uint64_t offset = line.size() + 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f[4];
    for (auto& field : f) std::getline(row, field, ',');
    try {
      d.push(std::stoll(f[0]), std::stod(f[1]), std::stod(f[2]), std::stol(f[3]));
    } catch (const std::exception&) {
      throw FormatError(offset, "malformed diagnostics row in " + path.string());
    }
    offset += line.size() + 1;
  }
  return d;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw InvalidInput("moving_average: window must be positive");
  std::vector<double> out;
  if (values.size() < window) return out;
  out.reserve(values.size() - window + 1);
  for (std::size_t i = window - 1; i < values.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i + 1 - window; k <= i; ++k) sum += values[k];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

std::vector<double> trailing_envelope(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw InvalidInput("trailing_envelope: window must be positive");
  std::vector<double> out;
  if (values.size() < window) return out;
  out.reserve(values.size() - window + 1);
  for (std::size_t i = window - 1; i < values.size(); ++i) {
    out.push_back(*std::max_element(values.begin() + static_cast<std::ptrdiff_t>(i + 1 - window),
                                    values.begin() + static_cast<std::ptrdiff_t>(i + 1)));
  }
  return out;
}

double batch_objective(const Matrix& batch, const Matrix& psi, const Matrix& phi,
                       const SparseCodeBatch& codes, double gamma) {
  const Matrix residual = batch - synthesize(psi, codes);
  double value = gamma * residual.squaredNorm();
  if (phi.rows() > 0) value += (phi * residual).squaredNorm();
  return 0.5 * value / static_cast<double>(batch.cols());
}

namespace {

OnlineResult run_online(const Matrix& data, const SensingDesign& design,
                        const Dictionary& psi0, const TrainConfig& config, double gamma,
                        std::mt19937_64& rng) {
  config.validate();
  if (data.rows() != psi0.signal_dim() || design.signal_dim() != data.rows()) {
    throw InvalidInput("train_dictionary_online: data, dictionary and sensing shapes differ");
  }
  if (config.eta > data.cols()) {
    throw InvalidConfig("batch size eta = " + std::to_string(config.eta) +
                        " exceeds the " + std::to_string(data.cols()) + " training columns");
  }

  std::optional<XiMatrices> xi;
  if (config.update_mode == UpdateMode::literal_paper) xi = xi_matrices(design, gamma);

  OnlineResult result;
  result.stats = SurrogateStats::zero(psi0.signal_dim(), psi0.atom_count());
  AtomUsage usage(psi0.atom_count());
  BatchIterator batches(data.cols(), config.eta, rng);
  Matrix psi = psi0.atoms();
  std::vector<Index> stale;

  for (std::int64_t t = 1; t <= config.iter_dic; ++t) {
    const Matrix x = BatchIterator::gather(data, batches.next());
    const Dictionary current(psi);
    const SparseCodeBatch codes =
        encode_train(x, current, design.phi, gamma, config.sparsity);
    const double objective = batch_objective(x, psi, design.phi, codes, gamma);
    usage.record(codes);
    result.stats = update_stats(result.stats, codes, x, t, config.rho, config.eta);

    stale = detail::update_columns(psi, result.stats, config.dict_update_passes,
                                   config.update_mode, gamma, xi ? &*xi : nullptr,
                                   detail::ColumnProjection::unit_sphere);
    Index replaced = 0;
    if (config.replace_every > 0 && t % config.replace_every == 0) {
      auto r = replace_unused_atoms(Dictionary(std::move(psi)), usage, data, rng, stale, t);
      psi = r.dictionary.atoms();
      replaced = static_cast<Index>(r.replaced.size());
    }
    result.diagnostics.push(t, objective, (psi - current.atoms()).norm(), replaced);
  }
  result.dictionary = Dictionary(std::move(psi));
  return result;
}

}  // namespace

OnlineResult train_dictionary_online(const Matrix& data, const SensingDesign& design,
                                     const Dictionary& psi0, const TrainConfig& config,
                                     std::mt19937_64& rng) {
  return run_online(data, design, psi0, config, config.gamma, rng);
}

OnlineResult train_dictionary_online(const Matrix& data, const SensingDesign& design,
                                     const Dictionary& psi0, const TrainConfig& config) {
  std::mt19937_64 rng(config.seed);
  return train_dictionary_online(data, design, psi0, config, rng);
}

OnlineResult train_dictionary_classic(const Matrix& data, const Dictionary& psi0,
                                      const TrainConfig& config, std::mt19937_64& rng) {
  return run_online(data, SensingDesign::disabled(data.rows()), psi0, config, 1.0, rng);
}

}  // namespace smsd

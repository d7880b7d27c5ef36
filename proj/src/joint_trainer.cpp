#include "smsd/joint_trainer.hpp"

#include "smsd/error.hpp"
#include "smsd/evaluation.hpp"
#include "smsd/patch_pipeline.hpp"
#include "smsd/persistence.hpp"
#include "smsd/sensing_design.hpp"
#include "smsd/sparse_coding.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

namespace smsd {

double objective_smsd(const Matrix& data, const Matrix& psi, const Matrix& phi,
                      const SparseCodeBatch& codes, double gamma) {
  if (codes.column_count() != data.cols() || psi.rows() != data.rows()) {
    throw InvalidInput("objective_smsd: shape mismatch");
  }
  const Matrix residual = data - synthesize(psi, codes);
  double value = gamma * residual.squaredNorm();
  if (phi.rows() > 0) value += (phi * residual).squaredNorm();
  return value;
}

double dictionary_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("dictionary_diff: shape mismatch");
  }
  return (a - b).norm();
}

Dictionary sample_initial_dictionary(const Matrix& data, Index atom_count,
                                     std::mt19937_64& rng) {
  std::vector<Index> order(static_cast<std::size_t>(data.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix atoms(data.rows(), atom_count);
  Index filled = 0;
  for (Index idx : order) {
    if (filled == atom_count) break;
    const double n = data.col(idx).norm();
    if (n < 1e-12) continue;
    atoms.col(filled++) = data.col(idx) / n;
  }
  if (filled < atom_count) {
    throw InvalidInput("sample_initial_dictionary: only " + std::to_string(filled) +
                       " non-zero training columns for " + std::to_string(atom_count) +
                       " atoms");
  }
  return Dictionary(std::move(atoms));
}

void write_config_json(const TrainConfig& c, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["gamma"] = c.gamma;
  j["eta"] = c.eta;
  j["K"] = c.sparsity;
  j["rho"] = c.rho;
  j["iterDic"] = c.iter_dic;
  j["iterSendic"] = c.iter_sendic;
  j["M"] = c.measurements;
  j["L"] = c.atoms;
  j["seed"] = c.seed;
  j["dictUpdatePasses"] = c.dict_update_passes;
  j["updateMode"] = to_string(c.update_mode);
  j["meanRemoval"] = c.mean_removal;
  j["replaceEvery"] = c.replace_every;
  j["probeFraction"] = c.probe_fraction;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

struct Split {
  Matrix train;
  Matrix probe;
};

Split split_probe(const Matrix& data, double fraction, Index eta, std::mt19937_64& rng) {
  const Index p = data.cols();
  Index probe_count = static_cast<Index>(static_cast<double>(p) * fraction);
  probe_count = std::min(probe_count, p - eta);
  if (probe_count <= 0) return {data, Matrix(data.rows(), 0)};
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> probe(order.begin(), order.begin() + probe_count);
  std::vector<Index> train(order.begin() + probe_count, order.end());
  std::sort(probe.begin(), probe.end());
  std::sort(train.begin(), train.end());
  return {BatchIterator::gather(data, train), BatchIterator::gather(data, probe)};
}

}  // namespace

JointResult train_joint(const Matrix& data, const TrainConfig& config,
                        const std::optional<Dictionary>& psi0, const JointOptions& options) {
  config.validate();
  std::mt19937_64 rng(config.seed);

  Split split;
  if (options.probe) {
    split = {data, *options.probe};
  } else {
    split = split_probe(data, config.probe_fraction, config.eta, rng);
  }
  if (config.eta > split.train.cols()) {
    throw InvalidConfig("batch size eta = " + std::to_string(config.eta) +
                        " exceeds the " + std::to_string(split.train.cols()) +
                        " training columns");
  }

  Dictionary psi = psi0 ? *psi0 : sample_initial_dictionary(split.train, config.atoms, rng);
  if (psi.signal_dim() != data.rows()) {
    throw InvalidInput("train_joint: initial dictionary does not match the data");
  }

  if (options.checkpoint_dir) {
    std::filesystem::create_directories(*options.checkpoint_dir);
    write_config_json(config, *options.checkpoint_dir / "train_config.json");
    save_matrix(psi.atoms(), *options.checkpoint_dir / "psi_0.smsd");
  }

  JointResult result;
  for (Index i = 1; i <= config.iter_sendic; ++i) {
    SensingDesign design;
    try {
      design = design_sensing(psi, config.measurements);
    } catch (const DegenerateDictionary& e) {
      throw DegenerateDictionary(std::string(e.what()) + " at outer iteration " +
                                 std::to_string(i) + "; last good checkpoint is " +
                                 std::to_string(i - 1));
    }

    OnlineResult inner = train_dictionary_online(split.train, design, psi, config, rng);
    psi = std::move(inner.dictionary);
    result.diagnostics.inner.append(inner.diagnostics, (i - 1) * config.iter_dic);

    if (split.probe.cols() > 0) {
      const SparseCodeBatch codes =
          encode_train(split.probe, psi, design.phi, config.gamma, config.sparsity);
      result.diagnostics.outer_objectives.push_back(
          objective_smsd(split.probe, psi.atoms(), design.phi, codes, config.gamma) /
          static_cast<double>(split.probe.cols()));
      const DecodeResult decoded =
          decode_measurements(design.phi * split.probe, psi, design.phi, config.sparsity);
      result.diagnostics.outer_probe_psnr.push_back(psnr(split.probe, decoded.reconstructed));
    }
    if (options.keep_snapshots) {
      result.diagnostics.phi_snapshots.push_back(design.phi);
      result.diagnostics.psi_snapshots.push_back(psi.atoms());
    }
    if (options.checkpoint_dir) {
      const auto& dir = *options.checkpoint_dir;
      save_matrix(design.phi, dir / ("phi_" + std::to_string(i) + ".smsd"));
      save_matrix(psi.atoms(), dir / ("psi_" + std::to_string(i) + ".smsd"));
      result.diagnostics.inner.write_csv(dir / "diagnostics.csv");
    }
    if (options.on_outer) options.on_outer(i, design, psi);
    result.design = std::move(design);
  }
  result.dictionary = std::move(psi);
  return result;
}

}  // namespace smsd

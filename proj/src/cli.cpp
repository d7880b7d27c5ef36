#include "smsd/cli_config.hpp"

#include "smsd/dict_learning.hpp"
#include "smsd/error.hpp"
#include "smsd/evaluation.hpp"
#include "smsd/image_io.hpp"
#include "smsd/joint_trainer.hpp"
#include "smsd/patch_pipeline.hpp"
#include "smsd/persistence.hpp"
#include "smsd/sensing_design.hpp"
#include "smsd/sparse_coding.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace smsd {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> commands = {
      "extract-patches", "train", "train-dict", "design-sensing",
      "reconstruct",     "evaluate", "diagnose"};
  return commands;
}

namespace {

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

Json to_json(const CliConfig& c) {
  const TrainConfig& t = c.train;
  Json j;
  j["command"] = c.command;
  j["gamma"] = t.gamma;
  j["eta"] = t.eta;
  j["K"] = t.sparsity;
  j["rho"] = t.rho;
  j["iterDic"] = t.iter_dic;
  j["iterSendic"] = t.iter_sendic;
  j["M"] = t.measurements;
  j["L"] = t.atoms;
  j["seed"] = t.seed;
  j["dictUpdatePasses"] = t.dict_update_passes;
  j["updateMode"] = to_string(t.update_mode);
  j["meanRemoval"] = t.mean_removal;
  j["replaceEvery"] = t.replace_every;
  j["probeFraction"] = t.probe_fraction;
  j["patchSize"] = c.patch_size;
  j["samplesPerImage"] = c.samples_per_image ? Json(*c.samples_per_image) : Json(nullptr);
  j["runDir"] = c.run_dir.string();
  j["corpus"] = c.corpus.string();
  j["testCorpus"] = c.test_corpus.string();
  j["images"] = path_strings(c.images);
  j["phi"] = c.phi.string();
  j["psi"] = c.psi.string();
  j["diagnostics"] = c.diagnostics.string();
  j["label"] = c.label;
  j["window"] = c.window;
  j["verbosity"] = c.verbosity;
  j["workers"] = c.workers;
  return j;
}

template <typename T>
T json_value(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(key, "config key '" + key + "' has the wrong type: " + e.what());
  }
}

void apply_json(CliConfig& c, const Json& root) {
  if (!root.is_object()) throw UsageError("", "config file must hold a JSON object");
  TrainConfig& t = c.train;
  for (const auto& [key, v] : root.items()) {
    if (key == "command") {
      // Informational when echoed back; the verb always comes from argv.
    } else if (key == "gamma") {
      t.gamma = json_value<double>(v, key);
    } else if (key == "eta") {
      t.eta = json_value<Index>(v, key);
    } else if (key == "K") {
      t.sparsity = json_value<Index>(v, key);
    } else if (key == "rho") {
      t.rho = json_value<double>(v, key);
    } else if (key == "iterDic") {
      t.iter_dic = json_value<Index>(v, key);
    } else if (key == "iterSendic") {
      t.iter_sendic = json_value<Index>(v, key);
    } else if (key == "M") {
      t.measurements = json_value<Index>(v, key);
    } else if (key == "L") {
      t.atoms = json_value<Index>(v, key);
    } else if (key == "seed") {
      t.seed = json_value<std::uint64_t>(v, key);
    } else if (key == "dictUpdatePasses") {
      t.dict_update_passes = json_value<Index>(v, key);
    } else if (key == "updateMode") {
      try {
        t.update_mode = parse_update_mode(json_value<std::string>(v, key));
      } catch (const InvalidConfig& e) {
        throw UsageError(key, e.what());
      }
    } else if (key == "meanRemoval") {
      t.mean_removal = json_value<bool>(v, key);
    } else if (key == "replaceEvery") {
      t.replace_every = json_value<Index>(v, key);
    } else if (key == "probeFraction") {
      t.probe_fraction = json_value<double>(v, key);
    } else if (key == "patchSize") {
      c.patch_size = json_value<Index>(v, key);
    } else if (key == "samplesPerImage") {
      if (v.is_null()) {
        c.samples_per_image.reset();
      } else {
        c.samples_per_image = json_value<Index>(v, key);
      }
    } else if (key == "runDir") {
      c.run_dir = json_value<std::string>(v, key);
    } else if (key == "corpus") {
      c.corpus = json_value<std::string>(v, key);
    } else if (key == "testCorpus") {
      c.test_corpus = json_value<std::string>(v, key);
    } else if (key == "images") {
      c.images.clear();
      for (const auto& p : json_value<std::vector<std::string>>(v, key)) c.images.emplace_back(p);
    } else if (key == "phi") {
      c.phi = json_value<std::string>(v, key);
    } else if (key == "psi") {
      c.psi = json_value<std::string>(v, key);
    } else if (key == "diagnostics") {
      c.diagnostics = json_value<std::string>(v, key);
    } else if (key == "label") {
      c.label = json_value<std::string>(v, key);
    } else if (key == "window") {
      c.window = json_value<Index>(v, key);
    } else if (key == "verbosity") {
      c.verbosity = json_value<int>(v, key);
    } else if (key == "workers") {
      c.workers = json_value<int>(v, key);
    } else {
      throw UsageError(key, "unknown config key '" + key + "'");
    }
  }
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config", "config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void validate(const CliConfig& c) {
  const TrainConfig& t = c.train;
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw UsageError(key, std::string(key) + ": " + what);
  };
  require(std::isfinite(t.gamma) && t.gamma > 0.0, "gamma", "must be positive");
  require(t.gamma <= 1.0, "gamma", "must not exceed 1");
  require(t.eta >= 1, "eta", "must be at least 1");
  require(t.sparsity >= 1, "K", "must be at least 1");
  require(std::isfinite(t.rho) && t.rho >= 0.0, "rho", "must be non-negative");
  require(t.iter_dic >= 1, "iterDic", "must be at least 1");
  require(t.iter_sendic >= 1, "iterSendic", "must be at least 1");
  require(t.measurements >= 1, "M", "must be at least 1");
  require(t.atoms >= 1, "L", "must be at least 1");
  require(t.dict_update_passes >= 1, "dictUpdatePasses", "must be at least 1");
  require(t.replace_every >= 0, "replaceEvery", "must be non-negative");
  require(t.probe_fraction >= 0.0 && t.probe_fraction < 1.0, "probeFraction",
          "must lie in [0, 1)");
  require(c.patch_size >= 1, "patchSize", "must be at least 1");
  require(!c.samples_per_image || *c.samples_per_image >= 1, "samplesPerImage",
          "must be at least 1");
  require(c.window >= 1, "window", "must be at least 1");
  require(c.workers >= 0, "workers", "must be non-negative");
  require(t.measurements <= c.patch_size * c.patch_size || c.command == "design-sensing",
          "M", "must not exceed the patch dimension");
  // Emits the K > M warning.
  t.validate();
}

// Flag name -> config key, for naming the key in usage errors.
const std::map<std::string, std::string>& flag_keys() {
  static const std::map<std::string, std::string> keys = {
      {"--gamma", "gamma"},
      {"--eta", "eta"},
      {"-K", "K"},
      {"--sparsity", "K"},
      {"--rho", "rho"},
      {"--iter-dic", "iterDic"},
      {"--iter-sendic", "iterSendic"},
      {"-M", "M"},
      {"--measurements", "M"},
      {"-L", "L"},
      {"--atoms", "L"},
      {"--seed", "seed"},
      {"--dict-update-passes", "dictUpdatePasses"},
      {"--update-mode", "updateMode"},
      {"--mean-removal", "meanRemoval"},
      {"--replace-every", "replaceEvery"},
      {"--probe-fraction", "probeFraction"},
      {"--patch-size", "patchSize"},
      {"--samples-per-image", "samplesPerImage"},
      {"--run-dir", "runDir"},
      {"--corpus", "corpus"},
      {"--test-corpus", "testCorpus"},
      {"--images", "images"},
      {"--phi", "phi"},
      {"--psi", "psi"},
      {"--diagnostics", "diagnostics"},
      {"--label", "label"},
      {"--window", "window"},
      {"--verbosity", "verbosity"},
      {"--workers", "workers"},
      {"--config", "config"}};
  return keys;
}

std::string key_for_error(const std::vector<std::string>& flags, const std::string& message) {
  for (const auto& f : flags) {
    const auto name = f.substr(0, f.find('='));
    if (message.find(name) != std::string::npos) {
      const auto it = flag_keys().find(name);
      if (it != flag_keys().end()) return it->second;
    }
  }
  return {};
}

}  // namespace

std::string config_to_json(const CliConfig& config) { return to_json(config).dump(2); }

CliConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<fs::path>& config_file) {
  if (args.empty()) throw UsageError("command", "missing command; expected one of the verbs");
  CliConfig c;
  c.command = args.front();
  const auto& verbs = cli_commands();
  if (std::find(verbs.begin(), verbs.end(), c.command) == verbs.end()) {
    throw UsageError("command", "unknown command '" + c.command + "'");
  }
  const std::vector<std::string> flags(args.begin() + 1, args.end());

  // --config is resolved first so that every other flag overrides the file.
  std::optional<fs::path> file = config_file;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] == "--config") {
      if (i + 1 >= flags.size()) throw UsageError("config", "--config needs a path");
      file = flags[i + 1];
    } else if (flags[i].rfind("--config=", 0) == 0) {
      file = flags[i].substr(9);
    }
  }
  if (file) apply_json(c, read_json_file(*file));

  TrainConfig& t = c.train;
  std::string update_mode = to_string(t.update_mode);
  std::string run_dir = c.run_dir.string(), corpus = c.corpus.string(),
              test_corpus = c.test_corpus.string(), phi = c.phi.string(),
              psi = c.psi.string(), diagnostics = c.diagnostics.string();
  std::vector<std::string> images = path_strings(c.images);
  Index samples = c.samples_per_image.value_or(0);
  std::string config_path;

  CLI::App app{"smsd " + c.command};
  app.allow_extras(true);
  app.add_option("--config", config_path);
  app.add_option("--gamma", t.gamma);
  app.add_option("--eta", t.eta);
  app.add_option("-K,--sparsity", t.sparsity);
  app.add_option("--rho", t.rho);
  app.add_option("--iter-dic", t.iter_dic);
  app.add_option("--iter-sendic", t.iter_sendic);
  app.add_option("-M,--measurements", t.measurements);
  app.add_option("-L,--atoms", t.atoms);
  app.add_option("--seed", t.seed);
  app.add_option("--dict-update-passes", t.dict_update_passes);
  app.add_option("--update-mode", update_mode);
  app.add_flag("--mean-removal", t.mean_removal);
  app.add_option("--replace-every", t.replace_every);
  app.add_option("--probe-fraction", t.probe_fraction);
  app.add_option("--patch-size", c.patch_size);
  auto* samples_opt = app.add_option("--samples-per-image", samples);
  app.add_option("--run-dir", run_dir);
  app.add_option("--corpus", corpus);
  app.add_option("--test-corpus", test_corpus);
  auto* images_opt = app.add_option("--images", images);
  app.add_option("--phi", phi);
  app.add_option("--psi", psi);
  app.add_option("--diagnostics", diagnostics);
  app.add_option("--label", c.label);
  app.add_option("--window", c.window);
  app.add_option("-v,--verbosity", c.verbosity);
  app.add_option("--workers", c.workers);

  std::vector<std::string> reversed(flags.rbegin(), flags.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(key_for_error(flags, e.what()), e.what());
  }
  const auto extras = app.remaining();
  if (!extras.empty()) {
    const auto name = extras.front().substr(0, extras.front().find('='));
    throw UsageError(name, "unknown flag '" + extras.front() + "'");
  }

  try {
    t.update_mode = parse_update_mode(update_mode);
  } catch (const Error& e) {
    throw UsageError("updateMode", e.what());
  }
  if (samples_opt->count() > 0) c.samples_per_image = samples;
  if (images_opt->count() > 0) {
    c.images.assign(images.begin(), images.end());
  }
  c.run_dir = run_dir;
  c.corpus = corpus;
  c.test_corpus = test_corpus;
  c.phi = phi;
  c.psi = psi;
  c.diagnostics = diagnostics;

  validate(c);
  return c;
}

namespace {

struct Logger {
  int verbosity = 1;
  void info(const std::string& line) const {
    if (verbosity >= 1) std::cout << line << '\n';
  }
  void detail(const std::string& line) const {
    if (verbosity >= 2) std::cout << line << '\n';
  }
};

std::vector<fs::path> expand_images(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".PNG" || ext == ".PGM") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw UsageError("images", "no input images given");
  return out;
}

PatchDataset dataset_from_images(const std::vector<fs::path>& paths, Index patch_size,
                                 std::optional<Index> samples, bool mean_removal,
                                 std::mt19937_64& rng, const Logger& log) {
  PatchDataset all;
  all.patch_size = patch_size;
  all.mean_removed = mean_removal;
  all.columns.resize(patch_size * patch_size, 0);
  Index id = 0;
  for (const auto& path : expand_images(paths)) {
    ExtractOptions opts;
    opts.patch_size = patch_size;
    opts.samples_per_image = samples;
    opts.mean_removal = mean_removal;
    opts.image_id = id++;
    opts.image_name = path.stem().string();
    const PatchDataset one = extract_patches(read_image(path), opts, rng);
    log.detail(path.string() + ": " + std::to_string(one.patch_count()) + " patches");
    append_dataset(all, one);
  }
  return all;
}

const fs::path& require_path(const fs::path& p, const char* key) {
  if (p.empty()) throw UsageError(key, std::string("--") + key + " is required for this command");
  return p;
}

PatchDataset test_set(const CliConfig& c, std::mt19937_64& rng, const Logger& log) {
  if (!c.test_corpus.empty()) return load_dataset(c.test_corpus);
  if (!c.images.empty()) {
    return dataset_from_images(c.images, c.patch_size, std::nullopt, c.train.mean_removal, rng,
                               log);
  }
  throw UsageError("testCorpus", "either --test-corpus or --images is required");
}

Matrix training_columns(const CliConfig& c, std::mt19937_64& rng, const Logger& log) {
  if (!c.corpus.empty()) return load_dataset(c.corpus).columns;
  if (!c.images.empty()) {
    return dataset_from_images(c.images, c.patch_size, c.samples_per_image, c.train.mean_removal,
                               rng, log)
        .columns;
  }
  throw UsageError("corpus", "either --corpus or --images is required");
}

fs::path run_file(const CliConfig& c, const std::string& name) { return c.run_dir / name; }

int cmd_extract(const CliConfig& c, const Logger& log) {
  std::mt19937_64 rng(c.train.seed);
  const PatchDataset data = dataset_from_images(c.images, c.patch_size,
                                                c.samples_per_image, c.train.mean_removal, rng,
                                                log);
  const fs::path out = c.corpus.empty() ? run_file(c, "corpus.smsd") : c.corpus;
  save_dataset(data, out);
  log.info("wrote " + std::to_string(data.patch_count()) + " patches from " +
           std::to_string(data.images.size()) + " images to " + out.string());
  return kExitSuccess;
}

void write_outer_csv(const JointRunDiagnostics& d, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "outer,probeObjective,probePsnr\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.outer_objectives.size(); ++i) {
    out << i + 1 << ',' << d.outer_objectives[i] << ',' << d.outer_probe_psnr[i] << '\n';
  }
}

int cmd_train(const CliConfig& c, const Logger& log) {
  std::mt19937_64 rng(c.train.seed);
  const Matrix data = training_columns(c, rng, log);
  JointOptions options;
  options.checkpoint_dir = c.run_dir;
  options.on_outer = [&log, &c](Index i, const SensingDesign&, const Dictionary&) {
    log.info("outer iteration " + std::to_string(i) + "/" + std::to_string(c.train.iter_sendic));
  };
  const JointResult result = train_joint(data, c.train, std::nullopt, options);
  save_matrix(result.design.phi, run_file(c, "phi.smsd"));
  save_matrix(result.dictionary.atoms(), run_file(c, "psi.smsd"));
  write_outer_csv(result.diagnostics, run_file(c, "outer.csv"));
  if (!result.diagnostics.outer_probe_psnr.empty()) {
    log.info("probe PSNR " + std::to_string(result.diagnostics.outer_probe_psnr.back()) + " dB");
  }
  log.info("wrote phi.smsd and psi.smsd to " + c.run_dir.string());
  return kExitSuccess;
}

int cmd_train_dict(const CliConfig& c, const Logger& log) {
  std::mt19937_64 rng(c.train.seed);
  const Matrix data = training_columns(c, rng, log);
  // Same mini-batch budget as the joint schedule.
  TrainConfig config = c.train;
  config.iter_dic = c.train.iter_dic * c.train.iter_sendic;
  const Dictionary psi0 = sample_initial_dictionary(data, config.atoms, rng);
  const OnlineResult result = train_dictionary_classic(data, psi0, config, rng);
  save_matrix(result.dictionary.atoms(), run_file(c, "psi.smsd"));
  result.diagnostics.write_csv(run_file(c, "diagnostics.csv"));
  log.info("wrote psi.smsd to " + c.run_dir.string());
  return kExitSuccess;
}

int cmd_design(const CliConfig& c, const Logger& log) {
  const Matrix psi = load_matrix(require_path(c.psi, "psi"));
  const SensingDesign design = design_sensing(psi, c.train.measurements);
  const GramResidualReport g = gram_residual(design.phi, psi);
  save_matrix(design.phi, run_file(c, "phi.smsd"));
  std::ostringstream os;
  os << std::setprecision(12) << "gram residual " << g.value << " (minimum " << g.theoretical_min
     << ", gap " << g.gap << ")";
  log.info(os.str());
  return kExitSuccess;
}

int cmd_reconstruct(const CliConfig& c, const Logger& log) {
  std::mt19937_64 rng(c.train.seed);
  const Matrix phi = load_matrix(require_path(c.phi, "phi"));
  const Dictionary psi(load_matrix(require_path(c.psi, "psi")));
  const PatchDataset test = test_set(c, rng, log);
  const DecodeResult decoded =
      decode_measurements(phi * test.columns, psi, phi, c.train.sparsity);
  save_matrix(decoded.reconstructed, run_file(c, "reconstructed.smsd"));
  const fs::path dir = run_file(c, "reconstructed");
  fs::create_directories(dir);
  for (const auto& info : test.images) {
    try {
      const GrayImage img = assemble_patches(test, decoded.reconstructed, info.id);
      write_image(img, dir / (info.name + ".png"));
      log.detail("wrote " + (dir / (info.name + ".png")).string());
    } catch (const MissingPatchError& e) {
      warn(info.name + ": " + e.what());
    }
  }
  log.info("reconstructed " + std::to_string(test.patch_count()) + " patches");
  return kExitSuccess;
}

int cmd_evaluate(const CliConfig& c, const Logger& log) {
  std::mt19937_64 rng(c.train.seed);
  const Matrix phi = load_matrix(require_path(c.phi, "phi"));
  const Dictionary psi(load_matrix(require_path(c.psi, "psi")));
  const PatchDataset test = test_set(c, rng, log);
  const std::vector<EvaluationReport> reports = {evaluate_cs_system(
      phi, psi, test, c.train.sparsity, c.label.empty() ? "system" : c.label)};
  write_report_csv(reports, run_file(c, "report.csv"));
  const std::string table = format_report_table(reports);
  std::ofstream(run_file(c, "report.txt")) << table;
  log.info(table);
  return kExitSuccess;
}

int cmd_diagnose(const CliConfig& c, const Logger& log) {
  const fs::path input = c.diagnostics.empty() ? run_file(c, "diagnostics.csv") : c.diagnostics;
  const Diagnostics d = Diagnostics::read_csv(input);
  const auto w = static_cast<std::size_t>(c.window);
  const std::vector<double> avg = moving_average(d.batch_objective, w);
  const std::vector<double> env = trailing_envelope(d.dict_diff, w);
  std::ofstream out(run_file(c, "trace.csv"), std::ios::trunc);
  if (!out) throw IoError("cannot write " + run_file(c, "trace.csv").string());
  out << "iteration,batchObjective,batchObjectiveMovingAverage,dictDiff,dictDiffEnvelope\n"
      << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.iteration[i] << ',' << d.batch_objective[i] << ',';
    if (i + 1 >= w) out << avg[i + 1 - w];
    out << ',' << d.dict_diff[i] << ',';
    if (i + 1 >= w) out << env[i + 1 - w];
    out << '\n';
  }
  log.info("wrote " + run_file(c, "trace.csv").string() + " (" + std::to_string(d.size()) +
           " iterations, window " + std::to_string(w) + ")");
  return kExitSuccess;
}

void print_usage(std::ostream& os) {
  os << "usage: smsd <command> [--config file.json] [flags]\n\ncommands:";
  for (const auto& v : cli_commands()) os << ' ' << v;
  os << "\n\nflags (config-file keys in parentheses):\n";
  for (const auto& [flag, key] : flag_keys()) os << "  " << flag << " (" << key << ")\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args.front() == "-h" || args.front() == "--help") {
    print_usage(args.empty() ? std::cerr : std::cout);
    return args.empty() ? kExitUsage : kExitSuccess;
  }
  CliConfig config;
  try {
    config = parse_config(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitUsage;
  }
  if (config.verbosity <= 0) set_warning_handler([](std::string_view) {});
#ifdef _OPENMP
  if (config.workers > 0) omp_set_num_threads(config.workers);
#endif
  const Logger log{config.verbosity};
  try {
    fs::create_directories(config.run_dir);
    {
      std::ofstream out(config.run_dir / "config.json", std::ios::trunc);
      if (!out) throw IoError("cannot write " + (config.run_dir / "config.json").string());
      out << config_to_json(config) << '\n';
    }
    const std::string& cmd = config.command;
    if (cmd == "extract-patches") return cmd_extract(config, log);
    if (cmd == "train") return cmd_train(config, log);
    if (cmd == "train-dict") return cmd_train_dict(config, log);
    if (cmd == "design-sensing") return cmd_design(config, log);
    if (cmd == "reconstruct") return cmd_reconstruct(config, log);
    if (cmd == "evaluate") return cmd_evaluate(config, log);
    return cmd_diagnose(config, log);
  } catch (const UsageError& e) {
    std::cerr << "usage error [" << e.key() << "]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateDictionary& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const StepSizeError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace smsd

// scenepred: generate synthetic triplets, predict the next frame, evaluate
// inference providers and report training losses.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "oracles.hpp"
#include "scenepred/config.hpp"
#include "scenepred/errors.hpp"
#include "scenepred/io.hpp"
#include "scenepred/pipeline.hpp"

namespace fs = std::filesystem;
using namespace scenepred;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

// Config file plus one flag per Config field, shared by every verb.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "configuration file (JSON object or key = value lines)");
    for (const auto& key : Config::keys()) {
      std::string dashed = key;
      for (char& c : dashed)
        if (c == '_') c = '-';
      std::string names = "--" + key;
      if (dashed != key) names += ",--" + dashed;
      options.emplace_back(key, app->add_option(names, values[key], Config::describe(key)));
    }
  }

  Overrides overrides() const {
    Overrides out;
    if (!file.empty()) out = parse_config_text(read_file(file));
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) out.emplace_back(key, values.at(key));
    return out;
  }
};

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << dump_json(j);
    return;
  }
  write_file_atomic(out, dump_json(j));
}

int run_selftest(std::uint64_t seed) {
  using namespace scenepred::oracle;
  const std::vector<SuiteResult> results = {
      geometry_suite(derive_seed(seed, {1}), 100000),
      splat_suite(derive_seed(seed, {2}), 100),
      mass_suite(derive_seed(seed, {3}), 100),
      angular_suite(derive_seed(seed, {4}), 100),
  };
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scene triplets, next-frame prediction and evaluation"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  int threads = default_thread_count();
  app.add_option("--threads", threads, "worker threads (default from SCENEPRED_THREADS, else 1)")
      ->check(CLI::PositiveNumber);

  ConfigFlags gen_flags, pred_flags, eval_flags, loss_flags;

  auto* gen = app.add_subcommand("generate", "render scenes and write ground-truth triplets");
  int scenes = 1;
  std::string gen_out;
  gen->add_option("--scenes", scenes, "number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "dataset directory")->required();
  gen_flags.attach(gen);

  auto* pred = app.add_subcommand("predict", "predict the third frame of one triplet");
  std::string triplet_dir, pred_out, pred_provider = "oracle";
  pred->add_option("--triplet", triplet_dir, "triplet directory")->required();
  pred->add_option("--provider", pred_provider, "oracle | noisy:k=v,... | files:DIR");
  pred->add_option("--out", pred_out, "output directory")->required();
  pred_flags.attach(pred);

  auto* eval = app.add_subcommand("evaluate", "segmentation and correlation metrics");
  std::string eval_dataset, eval_out, eval_provider = "oracle";
  eval->add_option("--dataset", eval_dataset, "dataset directory")->required();
  eval->add_option("--provider", eval_provider, "oracle | noisy:k=v,... | files:ROOT");
  eval->add_option("--out", eval_out, "metrics JSON file (default stdout)");
  eval_flags.attach(eval);

  auto* loss = app.add_subcommand("losses", "per-triplet loss terms and their means");
  std::string loss_dataset, loss_out, loss_provider = "oracle";
  bool no_collapse = false;
  loss->add_option("--dataset", loss_dataset, "dataset directory")->required();
  loss->add_option("--provider", loss_provider, "oracle | noisy:k=v,... | files:ROOT");
  loss->add_option("--out", loss_out, "report JSON file (default stdout)");
  loss->add_flag("--no-collapse", no_collapse, "omit the batch collapse term");
  loss_flags.attach(loss);

  auto* self = app.add_subcommand("selftest", "compare production kernels with brute-force oracles");
  std::uint64_t self_seed = 20240521;
  self->add_option("--seed", self_seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      Config config;
      for (const auto& [key, value] : gen_flags.overrides()) config.set(key, value);
      config.finalize();
      const GenerateSummary s = cmd_generate(config, scenes, gen_out, threads);
      std::cout << "wrote " << s.triplets.size() << " triplets from " << s.scenes << " scenes to "
                << gen_out << "\n";
    } else if (*pred) {
      const nlohmann::json s = cmd_predict(triplet_dir, ProviderSpec::parse(pred_provider), pred_out,
                                           pred_flags.overrides(), threads);
      std::cout << "mse_merged_confident " << s.at("mse_merged_confident").get<double>()
                << " over " << s.at("confident_pixels").get<std::size_t>() << " pixels; mse_merged "
                << s.at("mse_merged").get<double>() << "\n";
    } else if (*eval) {
      emit(cmd_evaluate(eval_dataset, ProviderSpec::parse(eval_provider), eval_flags.overrides(),
                        threads),
           eval_out);
    } else if (*loss) {
      emit(cmd_losses(loss_dataset, ProviderSpec::parse(loss_provider), loss_flags.overrides(),
                      threads, !no_collapse),
           loss_out);
    } else if (*self) {
      return run_selftest(self_seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

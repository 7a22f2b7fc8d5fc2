// signseg command-line tool. All heavy lifting goes through the shared
// library's C API; this file only parses arguments, merges flag overrides
// into the config document, and maps statuses to exit codes:
//   0 success, 1 usage error, 2 validation error, 3 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "signseg.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
};

// Loads the config file (or "{}") and applies flag overrides; flags win.
std::string build_config_json(const CommonArgs& args, int& exit_code) {
  nlohmann::json j = nlohmann::json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "signseg: cannot open config: " << args.config_path << "\n";
      exit_code = 3;
      return "";
    }
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "signseg: malformed config JSON: " << e.what() << "\n";
      exit_code = 2;
      return "";
    }
  }
  if (args.seed_set) j["train"]["seed"] = args.seed;
  if (args.out_set) j["paths"]["out_dir"] = args.out_dir;
  exit_code = 0;
  return j.dump();
}

int report_status(sgs_status status) {
  if (status != SGS_OK) std::cerr << "signseg: " << sgs_last_error() << "\n";
  return static_cast<int>(status);
}

std::string out_dir_or(const CommonArgs& args, const std::string& config_json) {
  if (args.out_set) return args.out_dir;
  const auto j = nlohmann::json::parse(config_json);
  if (j.contains("paths") && j["paths"].contains("out_dir")) {
    const std::string dir = j["paths"]["out_dir"].get<std::string>();
    if (!dir.empty()) return dir;
  }
  return ".";
}

std::string manifest_or(const std::string& flag, const std::string& config_json) {
  if (!flag.empty()) return flag;
  const auto j = nlohmann::json::parse(config_json);
  if (j.contains("paths") && j["paths"].contains("manifest")) {
    return j["paths"]["manifest"].get<std::string>();
  }
  return "";
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (JSON)")
      ->envname("SIGNSEG_CONFIG");
  cmd->add_option("--seed", args.seed, "Override train.seed")
      ->envname("SIGNSEG_SEED");
  cmd->add_option("--out", args.out_dir, "Output directory")
      ->envname("SIGNSEG_OUT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign segmentation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string manifest_flag, checkpoint_flag, split = "test";
  std::string eval_report_flag, predictions_flag, report_out = "eval.json";
  std::vector<std::string> sample_files;
  bool ablation = false;
  bool oracle = false;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth, args);

  CLI::App* train = app.add_subcommand("train", "Train a model");
  add_common(train, args);
  train->add_option("--manifest", manifest_flag, "Dataset manifest");
  train->add_flag("--ablation", ablation, "Run the feature/module grid");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval, args);
  eval->add_option("--checkpoint", checkpoint_flag, "Checkpoint file");
  eval->add_option("--manifest", manifest_flag, "Dataset manifest");
  eval->add_option("--split", split, "Split to evaluate (train|dev|test)");
  eval->add_option("--report", report_out, "Report output path");
  eval->add_flag("--oracle", oracle,
                 "Use the labels as predictions (metric path test hook)");

  CLI::App* predict = app.add_subcommand("predict", "Tag sample files");
  add_common(predict, args);
  predict->add_option("--checkpoint", checkpoint_flag, "Checkpoint file")
      ->required();
  predict->add_option("samples", sample_files, "Sample files")->required();

  CLI::App* report = app.add_subcommand("report", "Render plots and a summary");
  add_common(report, args);
  report->add_option("--eval", eval_report_flag, "Eval report JSON");
  report->add_option("--predictions", predictions_flag,
                     "Directory of .pred.json files");
  report->add_option("--manifest", manifest_flag, "Dataset manifest");
  report->add_option("--split", split, "Split for ground truth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "signseg: " << e.what() << "\n";
    return 1;
  }
  args.seed_set = app.get_subcommand(0)->count("--seed") > 0;
  args.out_set = !args.out_dir.empty();

  int code = 0;
  const std::string config_json = build_config_json(args, code);
  if (code != 0) return code;
  const std::string out_dir = out_dir_or(args, config_json);

  if (synth->parsed()) {
    const std::uint64_t seed = args.seed_set ? args.seed : 1234;
    return report_status(sgs_synth(config_json.c_str(), out_dir.c_str(), seed));
  }
  if (train->parsed()) {
    const std::string manifest = manifest_or(manifest_flag, config_json);
    if (manifest.empty()) {
      std::cerr << "signseg: no manifest given (--manifest or paths.manifest)\n";
      return 1;
    }
    return report_status(sgs_train(config_json.c_str(), manifest.c_str(),
                                   out_dir.c_str(), ablation ? 1 : 0));
  }
  if (eval->parsed()) {
    const std::string manifest = manifest_or(manifest_flag, config_json);
    if (manifest.empty()) {
      std::cerr << "signseg: no manifest given (--manifest or paths.manifest)\n";
      return 1;
    }
    if (!oracle && checkpoint_flag.empty()) {
      std::cerr << "signseg: --checkpoint is required without --oracle\n";
      return 1;
    }
    return report_status(
        sgs_eval(config_json.c_str(),
                 checkpoint_flag.empty() ? nullptr : checkpoint_flag.c_str(),
                 manifest.c_str(), split.c_str(), oracle ? 1 : 0,
                 report_out.c_str()));
  }
  if (predict->parsed()) {
    std::vector<const char*> paths;
    for (const std::string& s : sample_files) paths.push_back(s.c_str());
    return report_status(sgs_predict(config_json.c_str(),
                                     checkpoint_flag.c_str(), paths.data(),
                                     paths.size(), out_dir.c_str()));
  }
  if (report->parsed()) {
    const std::string manifest = manifest_or(manifest_flag, config_json);
    return report_status(sgs_report(
        eval_report_flag.empty() ? nullptr : eval_report_flag.c_str(),
        predictions_flag.empty() ? nullptr : predictions_flag.c_str(),
        manifest.empty() ? nullptr : manifest.c_str(),
        split.empty() ? nullptr : split.c_str(), out_dir.c_str()));
  }
  return 1;
}

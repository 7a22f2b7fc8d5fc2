#pragma once

#include <filesystem>
#include <vector>

#include "pipeline/config_file.hpp"

namespace signseg {

// File-level entry points behind the CLI and the C API. All paths are
// taken as given; outputs are deterministic for a fixed seed (wall-clock
// fields appear only in epoch logs).

// Writes one sample file per synthetic sequence plus manifest.json with
// a seeded 80/10/10 split.
void cmd_synth(const FullConfig& config, const std::filesystem::path& out_dir,
               std::uint64_t seed);

// Trains on the manifest's train/dev splits. Writes model.sgck (best-dev
// checkpoint), train_state.sgck (resumable state) and train_log.jsonl.
// With ablation=true runs the five-row feature/module grid and writes
// ablation.json instead of a single checkpoint.
void cmd_train(const FullConfig& config,
               const std::filesystem::path& manifest_path,
               const std::filesystem::path& out_dir, bool ablation);

// Evaluates a checkpoint over one split; writes the report JSON. With
// oracle_predictions=true the predictions are the labels themselves (test
// hook exercising the metric path end to end).
void cmd_eval(const FullConfig& config,
              const std::filesystem::path& checkpoint_path,
              const std::filesystem::path& manifest_path,
              const std::string& split, bool oracle_predictions,
              const std::filesystem::path& out_report_path);

// Writes <sample_id>.pred.json (tags plus decoded segments) per input.
void cmd_predict(const FullConfig& config,
                 const std::filesystem::path& checkpoint_path,
                 const std::vector<std::filesystem::path>& sample_paths,
                 const std::filesystem::path& out_dir);

// Renders summary.txt plus one timeline SVG per prediction with ground
// truth available. eval_report_path may be empty when predictions plus a
// labeled manifest are given (the report is then computed on the fly).
void cmd_report(const std::filesystem::path& eval_report_path,
                const std::filesystem::path& predictions_dir,
                const std::filesystem::path& manifest_path,
                const std::string& split,
                const std::filesystem::path& out_dir);

}  // namespace signseg

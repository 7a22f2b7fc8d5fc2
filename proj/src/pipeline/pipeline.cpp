#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <map>

#include "data/manifest.hpp"
#include "pipeline/report.hpp"
#include "train/ablation.hpp"
#include "train/predict.hpp"
#include "util/rng.hpp"
#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

std::vector<Sample> load_labeled_split(const std::filesystem::path& manifest_path,
                                       const Manifest& manifest, Split split) {
  std::vector<Sample> samples = load_split(manifest_path, manifest, split);
  if (samples.empty()) {
    throw ValidationError(std::string("manifest has no samples in split '") +
                          split_name(split) + "'");
  }
  for (const Sample& s : samples) {
    if (!s.labels) {
      throw ValidationError("sample '" + s.features.sample_id +
                            "' has no labels");
    }
  }
  return samples;
}

json prediction_to_json(const std::string& sample_id, const TagSequence& tags) {
  json tag_codes = json::array();
  for (BioTag t : tags.tags) tag_codes.push_back(static_cast<int>(t));
  json segments = json::array();
  for (const Segment& s : segments_from_tags(tags, OrphanPolicy::kPromote)) {
    segments.push_back({{"start", s.start}, {"end", s.end}});
  }
  return {{"sample_id", sample_id},
          {"frames", tags.size()},
          {"frame_rate_hz", tags.frame_rate_hz},
          {"tags", std::move(tag_codes)},
          {"segments", std::move(segments)}};
}

TagSequence prediction_from_json(const json& j) {
  TagSequence t;
  t.frame_rate_hz = j.at("frame_rate_hz").get<double>();
  for (const auto& code : j.at("tags")) {
    const int v = code.get<int>();
    if (v < 0 || v > 2) {
      throw ValidationError("prediction file: invalid tag code " +
                            std::to_string(v));
    }
    t.tags.push_back(static_cast<BioTag>(v));
  }
  return t;
}

}  // namespace

void cmd_synth(const FullConfig& config, const std::filesystem::path& out_dir,
               std::uint64_t seed) {
  ensure_dir(out_dir);
  const std::vector<Sample> samples = generate_synthetic(config.synth, seed);

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng = make_engine(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n = samples.size();
  const std::size_t n_train = (n * 8) / 10;
  const std::size_t n_dev = n / 10;

  Manifest manifest;
  std::vector<Split> split_of(n, Split::kTest);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_train) {
      split_of[order[k]] = Split::kTrain;
    } else if (k < n_train + n_dev) {
      split_of[order[k]] = Split::kDev;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    const std::string filename = s.features.sample_id + ".sgs";
    save_sample(out_dir / filename, s);
    manifest.entries.push_back(
        {s.features.sample_id, filename, split_of[i], s.frames()});
  }
  save_manifest(out_dir / "manifest.json", manifest);
}

void cmd_train(const FullConfig& config,
               const std::filesystem::path& manifest_path,
               const std::filesystem::path& out_dir, bool ablation) {
  const Manifest manifest = load_manifest(manifest_path);
  ensure_dir(out_dir);
  std::vector<Sample> train =
      load_labeled_split(manifest_path, manifest, Split::kTrain);
  std::vector<Sample> dev =
      load_labeled_split(manifest_path, manifest, Split::kDev);

  if (ablation) {
    std::vector<Sample> test =
        load_labeled_split(manifest_path, manifest, Split::kTest);
    const AblationReport report =
        run_ablation(config.model, config.train, config.metrics, train, dev, test);
    jsonutil::write_text_file((out_dir / "ablation.json").string(),
                              report.to_json().dump(2) + "\n");
    return;
  }

  Trainer trainer(config.model, config.train, config.metrics, std::move(train),
                  std::move(dev));
  const TrainResult result = trainer.run();
  save_checkpoint(out_dir / "model.sgck", result.best);
  trainer.save_state(out_dir / "train_state.sgck");
  write_epoch_log(out_dir / "train_log.jsonl", result.log);
}

void cmd_eval(const FullConfig& config,
              const std::filesystem::path& checkpoint_path,
              const std::filesystem::path& manifest_path,
              const std::string& split, bool oracle_predictions,
              const std::filesystem::path& out_report_path) {
  const Manifest manifest = load_manifest(manifest_path);
  const std::vector<Sample> samples =
      load_labeled_split(manifest_path, manifest, split_from_name(split));

  EvalReport report;
  if (oracle_predictions) {
    std::vector<EvalPair> pairs;
    for (const Sample& s : samples) {
      pairs.push_back({s.features.sample_id, *s.labels, *s.labels});
    }
    report = evaluate(pairs, config.metrics);
  } else {
    const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
    report = evaluate_checkpoint(checkpoint, samples, config.train.window,
                                 config.train.stride, config.metrics);
  }
  if (out_report_path.has_parent_path()) {
    ensure_dir(out_report_path.parent_path());
  }
  jsonutil::write_text_file(out_report_path.string(),
                            report.to_json().dump(2) + "\n");
}

void cmd_predict(const FullConfig& config,
                 const std::filesystem::path& checkpoint_path,
                 const std::vector<std::filesystem::path>& sample_paths,
                 const std::filesystem::path& out_dir) {
  if (sample_paths.empty()) {
    throw ValidationError("predict: no sample files given");
  }
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  Network<float> net = make_network(checkpoint);
  ensure_dir(out_dir);
  for (const auto& path : sample_paths) {
    const Sample sample = load_sample(path);
    const TagSequence tags =
        predict_tags(net, checkpoint.norm, sample, config.train.window,
                     config.train.stride);
    const json j = prediction_to_json(sample.features.sample_id, tags);
    jsonutil::write_text_file(
        (out_dir / (sample.features.sample_id + ".pred.json")).string(),
        j.dump(2) + "\n");
  }
}

void cmd_report(const std::filesystem::path& eval_report_path,
                const std::filesystem::path& predictions_dir,
                const std::filesystem::path& manifest_path,
                const std::string& split,
                const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);

  // Predictions, when given.
  std::map<std::string, TagSequence> predictions;
  if (!predictions_dir.empty()) {
    if (!std::filesystem::is_directory(predictions_dir)) {
      throw IoError("predictions directory not found: " +
                    predictions_dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(predictions_dir)) {
      if (entry.path().string().ends_with(".pred.json")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const json j = jsonutil::load_json_file(f.string());
      predictions[j.at("sample_id").get<std::string>()] = prediction_from_json(j);
    }
  }

  // Ground truth, when a manifest is given.
  std::map<std::string, TagSequence> ground_truth;
  if (!manifest_path.empty()) {
    const Manifest manifest = load_manifest(manifest_path);
    for (const ManifestEntry& e : manifest.entries) {
      if (!split.empty() && e.split != split_from_name(split)) continue;
      if (!predictions.empty() && !predictions.count(e.sample_id)) continue;
      const Sample s = load_sample(manifest_path.parent_path() / e.path);
      if (s.labels) ground_truth[e.sample_id] = *s.labels;
    }
  }

  EvalReport report;
  if (!eval_report_path.empty()) {
    report = EvalReport::from_json(
        jsonutil::load_json_file(eval_report_path.string()));
  } else if (!predictions.empty() && !ground_truth.empty()) {
    std::vector<EvalPair> pairs;
    for (const auto& [id, pred] : predictions) {
      auto it = ground_truth.find(id);
      if (it == ground_truth.end()) {
        throw ValidationError("report: no ground truth for sample '" + id + "'");
      }
      pairs.push_back({id, pred, it->second});
    }
    report = evaluate(pairs, MetricConfig{});
  } else {
    throw ValidationError(
        "report: need an eval report or predictions plus a labeled manifest");
  }

  std::map<std::string, SampleCategory> categories;
  for (const SampleDiagnostic& d : report.samples) {
    categories[d.sample_id] = d.category;
  }

  int timelines = 0;
  for (const auto& [id, pred] : predictions) {
    auto gt = ground_truth.find(id);
    if (gt == ground_truth.end()) continue;
    SampleCategory cat = SampleCategory::kMatched;
    if (auto it = categories.find(id); it != categories.end()) {
      cat = it->second;
    } else {
      const auto p = segments_from_tags(pred, OrphanPolicy::kPromote).size();
      const auto g = segments_from_tags(gt->second, OrphanPolicy::kPromote).size();
      cat = p > g   ? SampleCategory::kOverSegmented
            : p < g ? SampleCategory::kUnderSegmented
                    : SampleCategory::kMatched;
    }
    render_timeline_svg(out_dir / ("timeline_" + id + ".svg"), id, gt->second,
                        pred, cat);
    ++timelines;
  }

  write_report_summary(out_dir / "summary.txt", report, timelines);
}

}  // namespace signseg

#include "model/checkpoint.hpp"

#include <cmath>

namespace signseg {

namespace {

MatF vec_as_row(const VecF& v) {
  MatF m(1, v.size());
  m.row(0) = v.transpose();
  return m;
}

VecF row_as_vec(const MatF& m) { return m.row(0).transpose(); }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  Container file;
  file.meta["model_config"] = c.model.to_json();
  file.meta["modules"] = c.modules.to_json();
  file.meta["train"] = c.train_meta;
  file.meta["has_norm"] = c.norm.has_value();
  for (const auto& [name, tensor] : c.tensors) {
    file.add_f32(name, tensor);
  }
  if (c.norm) {
    file.add_f32("norm.hamer_mean", vec_as_row(c.norm->hamer_mean));
    file.add_f32("norm.hamer_std", vec_as_row(c.norm->hamer_std));
    file.add_f32("norm.angle_mean", vec_as_row(c.norm->angle_mean));
    file.add_f32("norm.angle_std", vec_as_row(c.norm->angle_std));
  }
  write_container(path, kCheckpointMagic, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const Container file = read_container(path, kCheckpointMagic);
  Checkpoint c;
  c.model = ModelConfig::from_json(file.meta.at("model_config"), "model");
  c.modules = ModulesConfig::from_json(file.meta.at("modules"), "modules");
  c.train_meta = file.meta.value("train", nlohmann::json::object());
  for (const ArrayRecord& a : file.arrays) {
    if (a.name.rfind("norm.", 0) == 0) continue;
    c.tensors[a.name] = file.get_f32(a.name);
  }
  if (file.meta.value("has_norm", false)) {
    NormStats n;
    n.hamer_mean = row_as_vec(file.get_f32("norm.hamer_mean", 1, kHamerDim));
    n.hamer_std = row_as_vec(file.get_f32("norm.hamer_std", 1, kHamerDim));
    n.angle_mean = row_as_vec(file.get_f32("norm.angle_mean", 1, kAngleDim));
    n.angle_std = row_as_vec(file.get_f32("norm.angle_std", 1, kAngleDim));
    c.norm = std::move(n);
  }
  return c;
}

void store_params(Checkpoint& c, Network<float>& net) {
  for (nn::Param<float>* p : net.parameters()) {
    c.tensors[p->name] = p->value;
  }
}

void load_params(const Checkpoint& c, Network<float>& net) {
  for (nn::Param<float>* p : net.parameters()) {
    auto it = c.tensors.find(p->name);
    if (it == c.tensors.end()) {
      throw ValidationError("checkpoint: missing tensor '" + p->name + "'");
    }
    if (it->second.rows() != p->value.rows() ||
        it->second.cols() != p->value.cols()) {
      throw ValidationError("checkpoint: tensor '" + p->name +
                            "' has wrong shape");
    }
    p->value = it->second;
  }
}

Network<float> make_network(const Checkpoint& c) {
  Network<float> net(c.model, c.modules, /*init_seed=*/0);
  load_params(c, net);
  return net;
}

void apply_normalization(const NormStats& stats, MatF& hamer, MatF& angles) {
  for (std::int64_t r = 0; r < hamer.rows(); ++r) {
    hamer.row(r) = (hamer.row(r).transpose() - stats.hamer_mean)
                       .cwiseQuotient(stats.hamer_std)
                       .transpose();
  }
  for (std::int64_t r = 0; r < angles.rows(); ++r) {
    angles.row(r) = (angles.row(r).transpose() - stats.angle_mean)
                        .cwiseQuotient(stats.angle_std)
                        .transpose();
  }
}

NormStats compute_normalization(const std::vector<Sample>& train) {
  NormStats s;
  s.hamer_mean = VecF::Zero(kHamerDim);
  s.angle_mean = VecF::Zero(kAngleDim);
  VecD hamer_sum = VecD::Zero(kHamerDim), hamer_sq = VecD::Zero(kHamerDim);
  VecD angle_sum = VecD::Zero(kAngleDim), angle_sq = VecD::Zero(kAngleDim);
  double n = 0.0;
  for (const Sample& sample : train) {
    const MatD h = sample.features.hamer.cast<double>();
    const MatD a = sample.features.angles.cast<double>();
    hamer_sum += h.colwise().sum().transpose();
    hamer_sq += h.array().square().matrix().colwise().sum().transpose();
    angle_sum += a.colwise().sum().transpose();
    angle_sq += a.array().square().matrix().colwise().sum().transpose();
    n += static_cast<double>(sample.frames());
  }
  if (n <= 0.0) throw ValidationError("normalization: no frames in train split");
  auto finish = [&](const VecD& sum, const VecD& sq, VecF& mean, VecF& std_out) {
    const VecD m = sum / n;
    VecD var = sq / n - m.cwiseProduct(m);
    std_out.resize(m.size());
    mean = m.cast<float>();
    for (std::int64_t i = 0; i < var.size(); ++i) {
      std_out[i] = static_cast<float>(std::sqrt(std::max(var[i], 1e-8)));
    }
  };
  finish(hamer_sum, hamer_sq, s.hamer_mean, s.hamer_std);
  finish(angle_sum, angle_sq, s.angle_mean, s.angle_std);
  return s;
}

}  // namespace signseg

#include "ue/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "models.hpp"
#include "ue/bnn/hmc.hpp"
#include "ue/bnn/mean_field.hpp"
#include "ue/bnn/predict.hpp"
#include "ue/bnn/serialize.hpp"
#include "ue/gp/laplace.hpp"
#include "ue/harness/digest.hpp"
#include "ue/mcdropout/mcdropout.hpp"
#include "ue/nnet/serialize.hpp"
#include "ue/nnet/train.hpp"
#include "ue/numerics/rng.hpp"

namespace ue::harness {

namespace detail {

namespace {

constexpr Eigen::Index kEncodeChunk = 1024;

std::filesystem::path model_path(const std::filesystem::path& dir, std::string_view domain, std::string_view name) {
  return dir / fmt::format("{}_{}.uep", domain, name);
}

// Loads from load_dir when configured, otherwise trains; then saves to
// save_dir when configured. Returns the git blob id of the serialized model.
template <typename T, typename Train, typename Save, typename Load>
std::string obtain(T& model, const RunOptions& options, std::string_view domain, std::string_view name,
                   Train&& train, Save&& save, Load&& load) {
  if (options.load_dir) {
    const auto path = model_path(*options.load_dir, domain, name);
    if (!std::filesystem::exists(path)) throw IoError(fmt::format("model file {} not found", path.string()));
    progress(options, fmt::format("loading {}", path.string()));
    model = load(path);
  } else {
    progress(options, fmt::format("training {}", name));
    model = train();
  }
  if (options.save_dir) {
    std::filesystem::create_directories(*options.save_dir);
    const auto path = model_path(*options.save_dir, domain, name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    save(model, out);
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
  }
  return git_blob_sha1_stream([&](std::ostream& out) { save(model, out); });
}

Dataset maybe_subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n >= d.size()) return d;
  return subsample(d, n, seed);
}

nnet::TrainConfig train_config(const ExperimentConfig& cfg, const std::string& prefix, std::uint64_t seed) {
  nnet::TrainConfig t;
  t.optimizer = cfg.contains(prefix + "optimizer") ? nnet::parse_optimizer(cfg.get_string(prefix + "optimizer"))
                                                   : nnet::Optimizer::kAdam;
  t.learning_rate = cfg.get_double(prefix + "learning_rate");
  t.batch_size = cfg.get_size(prefix + "batch_size");
  t.epochs = cfg.get_size(prefix + "epochs");
  t.dropout_rate = cfg.get_double(prefix + "dropout");
  t.weight_decay = cfg.get_double(prefix + "weight_decay");
  t.seed = seed;
  return t;
}

std::vector<int> threshold(const Vector& p1) {
  std::vector<int> out(static_cast<std::size_t>(p1.size()));
  for (Eigen::Index i = 0; i < p1.size(); ++i) out[static_cast<std::size_t>(i)] = p1(i) > 0.5 ? 1 : 0;
  return out;
}

std::vector<int> argmax_labels(const nnet::MLPParams& net, const DenseMatrix& x) {
  std::vector<int> out(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index start = 0; start < x.cols(); start += kEncodeChunk) {
    const Eigen::Index len = std::min(kEncodeChunk, x.cols() - start);
    const DenseMatrix logits = nnet::forward_batch(net, x.middleCols(start, len));
    for (Eigen::Index j = 0; j < len; ++j) {
      Eigen::Index arg = 0;
      logits.col(j).maxCoeff(&arg);
      out[static_cast<std::size_t>(start + j)] = static_cast<int>(arg);
    }
  }
  return out;
}

MethodOutput from_probs(const DenseMatrix& mean_probs, std::optional<Vector> member_entropy) {
  MethodOutput out;
  const Eigen::Index m = mean_probs.cols();
  out.p_class1 = mean_probs.row(1).transpose();
  out.entropy.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double p1 = std::clamp(mean_probs(1, j), 0.0, 1.0);
    out.p_class1(j) = p1;
    out.entropy(j) = binary_entropy(p1);
  }
  out.mean_member_entropy = std::move(member_entropy);
  return out;
}

class GpModel : public FittedModel {
 public:
  std::optional<nnet::MLPParams> encoder;
  std::size_t encode_layer = 0;
  gp::LaplaceGPState state;

  DenseMatrix features(const DenseMatrix& x) const {
    if (!encoder) return x;
    DenseMatrix out(static_cast<Eigen::Index>(encoder->layer_sizes()[encode_layer]), x.cols());
    for (Eigen::Index start = 0; start < x.cols(); start += kEncodeChunk) {
      const Eigen::Index len = std::min(kEncodeChunk, x.cols() - start);
      out.middleCols(start, len) = nnet::encode_batch(*encoder, x.middleCols(start, len), encode_layer);
    }
    return out;
  }

  MethodOutput predict(const DenseMatrix& probes) const override {
    const gp::BatchPrediction b = gp::predict_batch(state, features(probes));
    MethodOutput out;
    out.p_class1 = b.p_class1;
    out.entropy.resize(b.p_class1.size());
    for (Eigen::Index j = 0; j < b.p_class1.size(); ++j) out.entropy(j) = binary_entropy(b.p_class1(j));
    return out;
  }
};

class McDropoutModel : public FittedModel {
 public:
  nnet::MLPParams net;
  mcdropout::MCDropoutConfig mc;

  MethodOutput predict(const DenseMatrix& probes) const override {
    const mcdropout::BatchResult r = mcdropout::mc_average_batch(net, probes, mc);
    return from_probs(r.mean_probs, r.mean_pass_entropy);
  }
  std::vector<int> point_labels(const DenseMatrix& x) const override { return argmax_labels(net, x); }
};

class MfviModel : public FittedModel {
 public:
  bnn::MeanFieldPosterior q;
  std::size_t draws = 100;
  std::uint64_t draw_seed = 0;

  MethodOutput predict(const DenseMatrix& probes) const override {
    const RngStream root(draw_seed);
    const bnn::EnsemblePrediction r = bnn::ensemble_predict(
        q.layer_sizes, draws,
        [&](std::size_t k) {
          RngStream rng = root.split(k);
          return q.sample(rng);
        },
        probes);
    return from_probs(r.mean_probs, r.mean_member_entropy);
  }
  std::vector<int> point_labels(const DenseMatrix& x) const override { return argmax_labels(q.mean_network(), x); }
};

class HmcModel : public FittedModel {
 public:
  bnn::PosteriorChain chain;

  MethodOutput predict(const DenseMatrix& probes) const override {
    const bnn::EnsemblePrediction r = bnn::ensemble_predict(
        chain.layer_sizes, chain.samples.size(), [&](std::size_t k) { return chain.samples[k]; }, probes);
    return from_probs(r.mean_probs, r.mean_member_entropy);
  }
};

std::unique_ptr<FittedModel> fit_gp(const Dataset& train, const ExperimentConfig& cfg, std::string_view domain,
                                    const RunOptions& options) {
  auto model = std::make_unique<GpModel>();
  const std::vector<std::size_t> enc_layers = cfg.get_sizes("gp.encoder_layers");
  if (!enc_layers.empty()) {
    const std::uint64_t seed = derive_seed(cfg.seed(), kEncoderTrain);
    model->encode_layer = cfg.get_size("gp.encoder_layer");
    nnet::MLPParams enc;
    model->hashes["gp_encoder"] = obtain(
        enc, options, domain, "gp_encoder",
        [&] {
          nnet::TrainConfig t = train_config(cfg, "gp.encoder_", seed);
          return nnet::train(nnet::mlp_init(enc_layers, derive_seed(seed, 0)), train, t).params;
        },
        [](const nnet::MLPParams& p, std::ostream& out) { io::save_mlp(p, out); },
        [](const std::filesystem::path& path) { return io::load_mlp(path); });
    if (enc.layer_sizes() != enc_layers) throw FormatError("stored GP encoder does not match gp.encoder_layers");
    model->encoder = std::move(enc);
  }
  const Dataset sub = maybe_subsample(train, cfg.get_size("gp.train_subsample"), derive_seed(cfg.seed(), kGpSubsample));
  const Dataset feats(model->features(sub.features()), sub.labels(), sub.source());
  const auto grid = gp::length_scale_grid(static_cast<int>(cfg.get_int("gp.length_scale_min_exp")),
                                          static_cast<int>(cfg.get_int("gp.length_scale_max_exp")),
                                          cfg.get_double("gp.signal_variance"));
  gp::LaplaceOptions lo;
  lo.link = gp::parse_link(cfg.get_string("gp.link"));
  lo.tol = cfg.get_double("gp.tol");
  lo.max_iter = cfg.get_size("gp.max_iter");
  progress(options, fmt::format("fitting gp on {} points", feats.size()));
  gp::HyperparamFit fit = gp::fit_hyperparams(feats, grid, lo);
  model->state = std::move(fit.state);
  const auto& s = model->state;
  std::string bytes = fmt::format("{:.17g} {:.17g} {} ", s.params.length_scale, s.params.signal_variance,
                                  gp::to_string(s.link));
  bytes.append(reinterpret_cast<const char*>(s.f_hat.data()), static_cast<std::size_t>(s.f_hat.size()) * sizeof(double));
  model->hashes["gp"] = git_blob_sha1(bytes);
  return model;
}

std::unique_ptr<FittedModel> fit_mcdropout(const Dataset& train, const ExperimentConfig& cfg, std::string_view domain,
                                           const RunOptions& options) {
  auto model = std::make_unique<McDropoutModel>();
  const auto layers = cfg.get_sizes("mcdropout.layers");
  const std::uint64_t seed = derive_seed(cfg.seed(), kMcDropoutTrain);
  model->hashes["mcdropout"] = obtain(
      model->net, options, domain, "mcdropout",
      [&] {
        nnet::TrainConfig t = train_config(cfg, "mcdropout.", seed);
        return nnet::train(nnet::mlp_init(layers, derive_seed(seed, 0)), train, t).params;
      },
      [](const nnet::MLPParams& p, std::ostream& out) { io::save_mlp(p, out); },
      [](const std::filesystem::path& path) { return io::load_mlp(path); });
  if (model->net.layer_sizes() != layers) throw FormatError("stored MC dropout model does not match mcdropout.layers");
  model->mc.n_samples = cfg.get_size("mcdropout.samples");
  model->mc.dropout_rate = cfg.get_double("mcdropout.dropout");
  model->mc.seed = derive_seed(cfg.seed(), kMcDropoutEval);
  return model;
}

std::unique_ptr<FittedModel> fit_mfvi(const Dataset& train, const ExperimentConfig& cfg, std::string_view domain,
                                      const RunOptions& options) {
  auto model = std::make_unique<MfviModel>();
  const auto layers = cfg.get_sizes("mfvi.layers");
  model->hashes["mfvi"] = obtain(
      model->q, options, domain, "mfvi",
      [&] {
        bnn::MFVIConfig m;
        m.epochs = cfg.get_size("mfvi.epochs");
        m.batch_size = cfg.get_size("mfvi.batch_size");
        m.learning_rate = cfg.get_double("mfvi.learning_rate");
        m.kl_weight = cfg.get_double("mfvi.kl_weight");
        m.prior_precision = cfg.get_double("mfvi.prior_precision");
        m.rho_init = cfg.get_double("mfvi.rho_init");
        m.seed = derive_seed(cfg.seed(), kMfviTrain);
        return bnn::mfvi_train(layers, train, m).posterior;
      },
      [](const bnn::MeanFieldPosterior& q, std::ostream& out) { io::save_mean_field(q, out); },
      [](const std::filesystem::path& path) { return io::load_mean_field(path); });
  if (model->q.layer_sizes != layers) throw FormatError("stored MFVI posterior does not match mfvi.layers");
  model->draws = cfg.get_size("mfvi.predict_samples");
  model->draw_seed = derive_seed(cfg.seed(), kMfviDraws);
  return model;
}

std::unique_ptr<FittedModel> fit_hmc(const Dataset& train, const ExperimentConfig& cfg, std::string_view domain,
                                     const RunOptions& options) {
  auto model = std::make_unique<HmcModel>();
  const auto layers = cfg.get_sizes("hmc.layers");
  model->hashes["hmc"] = obtain(
      model->chain, options, domain, "hmc",
      [&] {
        bnn::HMCConfig h;
        h.step_size = cfg.get_double("hmc.step_size");
        h.trajectory_length = cfg.get_size("hmc.trajectory_length");
        h.n_samples = cfg.get_size("hmc.samples");
        h.burn_in = cfg.get_size("hmc.burn_in");
        h.thin = cfg.get_size("hmc.thin");
        h.prior_precision = cfg.get_double("hmc.prior_precision");
        h.seed = derive_seed(cfg.seed(), kHmcChain);
        bnn::MapWarmStart warm;
        warm.epochs = cfg.get_size("hmc.warm_epochs");
        warm.learning_rate = cfg.get_double("hmc.warm_learning_rate");
        warm.batch_size = cfg.get_size("hmc.warm_batch_size");
        const Dataset sub =
            maybe_subsample(train, cfg.get_size("hmc.train_subsample"), derive_seed(cfg.seed(), kHmcSubsample));
        return bnn::hmc_sample(sub, layers, h, warm);
      },
      [](const bnn::PosteriorChain& c, std::ostream& out) { io::save_chain(c, out); },
      [](const std::filesystem::path& path) { return io::load_chain(path); });
  if (model->chain.layer_sizes != layers) throw FormatError("stored HMC chain does not match hmc.layers");
  return model;
}

}  // namespace

std::vector<int> FittedModel::point_labels(const DenseMatrix& x) const { return threshold(predict(x).p_class1); }

std::unique_ptr<FittedModel> fit_model(Method m, const Dataset& train, const ExperimentConfig& cfg,
                                       std::string_view domain, const RunOptions& options) {
  try {
    switch (m) {
      case Method::kGp: return fit_gp(train, cfg, domain, options);
      case Method::kMcDropout: return fit_mcdropout(train, cfg, domain, options);
      case Method::kMfvi: return fit_mfvi(train, cfg, domain, options);
      case Method::kHmc: return fit_hmc(train, cfg, domain, options);
    }
  } catch (const Divergence& e) {
    throw Divergence(fmt::format("{}: {}", to_string(m), e.what()));
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format("{}: {}", to_string(m), e.what()));
  }
  throw PreconditionError("unknown method");
}

double point_accuracy(const FittedModel& model, const Dataset& d) {
  const std::vector<int> labels = model.point_labels(d.features());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) correct += labels[i] == d.label(i) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

void progress(const RunOptions& options, std::string_view message) {
  if (options.verbose) fmt::print(stderr, "[ue-probe] {}\n", message);
}

UncertaintyReport make_report(const ExperimentConfig& cfg) {
  UncertaintyReport r;
  r.experiment = std::string(to_string(cfg.experiment()));
  r.seed = cfg.seed();
  r.config_digest = cfg.digest();
  return r;
}

void add_rows(UncertaintyReport& r, Method m, const MethodOutput& out, const std::vector<std::string>& ids,
              const std::vector<std::string>& descriptors) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    ReportRow row;
    row.probe_id = ids[i];
    row.method = m;
    row.descriptor = descriptors[i];
    row.p_class1 = out.p_class1(j);
    row.entropy_nats = out.entropy(j);
    if (out.mean_member_entropy) row.mean_member_entropy = (*out.mean_member_entropy)(j);
    r.add_row(std::move(row));
  }
}

std::string num(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  return fmt::format("{:.9g}", v);
}

}  // namespace detail

std::filesystem::path derive_test_path(const std::filesystem::path& train_path) {
  std::string name = train_path.filename().string();
  if (!name.starts_with("train-")) {
    throw PreconditionError(
        fmt::format("cannot derive a test path from '{}'; set mnist.test_images / mnist.test_labels", name));
  }
  return train_path.parent_path() / ("t10k-" + name.substr(6));
}

MnistData load_mnist(const ExperimentConfig& cfg) {
  const std::filesystem::path train_images = cfg.get_string("mnist.train_images");
  const std::filesystem::path train_labels = cfg.get_string("mnist.train_labels");
  if (train_images.empty() || train_labels.empty()) {
    throw PreconditionError("MNIST experiments need --mnist-images and --mnist-labels");
  }
  std::filesystem::path test_images = cfg.get_string("mnist.test_images");
  std::filesystem::path test_labels = cfg.get_string("mnist.test_labels");
  if (test_images.empty()) test_images = derive_test_path(train_images);
  if (test_labels.empty()) test_labels = derive_test_path(train_labels);
  const std::vector<int> keep = {0, 1};
  Dataset test_all = load_idx(test_images, test_labels);
  Dataset test01 = filter_classes(test_all, keep);
  return MnistData{filter_classes(load_idx(train_images, train_labels), keep), std::move(test01), std::move(test_all)};
}

UncertaintyReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  switch (cfg.experiment()) {
    case Experiment::kToy2d: return run_toy2d(cfg, options);
    case Experiment::kMnistInterp: return run_mnist_interp(cfg, options);
    case Experiment::kDigitTable: return run_digit_table(cfg, options);
    case Experiment::kTheoremCheck: return run_theorem_check(cfg);
  }
  throw PreconditionError("unknown experiment");
}

}  // namespace ue::harness

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/harness/config.hpp"
#include "ue/harness/experiment.hpp"
#include "ue/numerics/types.hpp"

namespace ue::harness::detail {

// Sub-stream ids under the run seed.
enum SeedSlot : std::uint64_t {
  kProbePairs = 1,
  kGpSubsample = 2,
  kEncoderTrain = 3,
  kMcDropoutTrain = 4,
  kMcDropoutEval = 5,
  kMfviTrain = 6,
  kMfviDraws = 7,
  kHmcChain = 8,
  kHmcSubsample = 9,
};

struct MethodOutput {
  Vector p_class1;
  Vector entropy;
  std::optional<Vector> mean_member_entropy;
};

class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual MethodOutput predict(const DenseMatrix& probes) const = 0;
  // Labels from the method's point predictor (deterministic network, mean
  // network, or thresholded predictive probability).
  virtual std::vector<int> point_labels(const DenseMatrix& x) const;

  std::map<std::string, std::string> hashes;  // artifact name -> git blob id
};

// Trains (or loads) one method on binary training data. `domain` prefixes
// model file names ("toy2d", "mnist").
std::unique_ptr<FittedModel> fit_model(Method m, const Dataset& train, const ExperimentConfig& cfg,
                                       std::string_view domain, const RunOptions& options);

double point_accuracy(const FittedModel& model, const Dataset& d);

void progress(const RunOptions& options, std::string_view message);

// Common metadata for a fresh report.
UncertaintyReport make_report(const ExperimentConfig& cfg);

// Appends one row per probe for method m.
void add_rows(UncertaintyReport& r, Method m, const MethodOutput& out, const std::vector<std::string>& ids,
              const std::vector<std::string>& descriptors);

std::string num(double v);  // compact 9-significant-digit formatting for ids and descriptors

}  // namespace ue::harness::detail

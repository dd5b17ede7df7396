#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ue/datasets/dataset.hpp"
#include "ue/error.hpp"
#include "ue/harness/config.hpp"
#include "ue/harness/report.hpp"

namespace ue::harness {

// Trained models are written to save_dir and read from load_dir. With
// load_dir set every needed model file must exist there (IoError otherwise).
struct RunOptions {
  std::optional<std::filesystem::path> save_dir;
  std::optional<std::filesystem::path> load_dir;
  bool verbose = false;  // progress lines on stderr
};

// Raised by run_theorem_check; carries the full report so callers can still
// write it out.
class TheoremViolation : public AssertionFailure {
 public:
  TheoremViolation(const std::string& what, std::shared_ptr<const UncertaintyReport> report)
      : AssertionFailure(what), report_(std::move(report)) {}
  const UncertaintyReport& report() const { return *report_; }

 private:
  std::shared_ptr<const UncertaintyReport> report_;
};

// Grid and named-point entropies for every requested method on the
// two-Gaussian toy problem.
UncertaintyReport run_toy2d(const ExperimentConfig& cfg, const RunOptions& options = {});

// Entropy along straight lines between random 0/1 test pairs, t over the
// configured grid. Per-t means land in the summary.
UncertaintyReport run_mnist_interp(const ExperimentConfig& cfg, const RunOptions& options = {});

// MC-dropout entropy of every test digit for a network trained on 0 and 1.
UncertaintyReport run_digit_table(const ExperimentConfig& cfg, const RunOptions& options = {});

// GP predictions at growing distance from the data; throws TheoremViolation
// if the predicted probability fails to approach 1/2 as the kernel vector
// vanishes.
UncertaintyReport run_theorem_check(const ExperimentConfig& cfg);

UncertaintyReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct MnistData {
  Dataset train01;   // training digits 0 and 1
  Dataset test01;    // test digits 0 and 1
  Dataset test_all;  // every test digit, original labels
};

// Test paths left empty in the config are derived from the training paths by
// replacing the "train-" file prefix with "t10k-".
MnistData load_mnist(const ExperimentConfig& cfg);
std::filesystem::path derive_test_path(const std::filesystem::path& train_path);

}  // namespace ue::harness

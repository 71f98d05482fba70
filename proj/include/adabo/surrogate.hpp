#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adabo/random.hpp"
#include "adabo/space.hpp"

namespace adabo {

enum class SurrogateKind { GP, RF, ET, GBRT };

const char* to_string(SurrogateKind kind);
SurrogateKind surrogate_from_string(const std::string& name);

// Predictive mean and standard deviation at one query point, in objective
// units (minimization sign).
struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

// Training data in normalized coordinates, targets in minimization sign.
struct Dataset {
  std::vector<UnitVector> inputs;
  std::vector<double> targets;

  std::size_t size() const { return inputs.size(); }
  std::size_t dims() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

struct SurrogateConfig {
  int forest_trees = 100;
  double forest_std_floor = 0.0;
  int gp_restarts = 8;
  double gp_noise = 1e-6;
  int gbrt_stages = 100;
  double gbrt_learning_rate = 0.1;
  int gbrt_max_depth = 3;
};

// A fitted model; immutable, shareable across threads.
class Surrogate {
 public:
  virtual ~Surrogate() = default;

  // x must lie in the unit cube and match the training dimensionality.
  virtual Prediction predict(std::span<const double> x) const = 0;

  // Batched predict; overridden where a vectorized path exists.
  virtual std::vector<Prediction> predict_many(const std::vector<UnitVector>& xs) const;
};

// Validates data, dispatches on kind. Deterministic for a fixed rng state.
// Throws ValidationError on bad data, FitError when no model can be built.
std::unique_ptr<Surrogate> fit_surrogate(SurrogateKind kind, const Dataset& data,
                                         RandomSource& rng, const SurrogateConfig& cfg);

// Shared by the concrete models: bounds and dimension check for queries.
void check_query(std::span<const double> x, std::size_t dims);

}  // namespace adabo

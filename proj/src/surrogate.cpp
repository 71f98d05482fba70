#include "adabo/surrogate.hpp"

#include <cmath>

#include "adabo/errors.hpp"
#include "adabo/forest.hpp"
#include "adabo/gbrt.hpp"
#include "adabo/gp.hpp"

namespace adabo {

const char* to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::GP: return "GP";
    case SurrogateKind::RF: return "RF";
    case SurrogateKind::ET: return "ET";
    case SurrogateKind::GBRT: return "GBRT";
  }
  return "?";
}

SurrogateKind surrogate_from_string(const std::string& name) {
  if (name == "GP") return SurrogateKind::GP;
  if (name == "RF") return SurrogateKind::RF;
  if (name == "ET") return SurrogateKind::ET;
  if (name == "GBRT") return SurrogateKind::GBRT;
  throw ConfigError("unknown surrogate kind '" + name + "'");
}

void check_query(std::span<const double> x, std::size_t dims) {
  if (x.size() != dims)
    throw ValidationError("predict: expected " + std::to_string(dims) + " coordinates, got " +
                          std::to_string(x.size()));
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("predict: query outside the unit cube");
  }
}

std::vector<Prediction> Surrogate::predict_many(const std::vector<UnitVector>& xs) const {
  std::vector<Prediction> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict(xs[i]);
  return out;
}

std::unique_ptr<Surrogate> fit_surrogate(SurrogateKind kind, const Dataset& data,
                                         RandomSource& rng, const SurrogateConfig& cfg) {
  if (data.size() == 0) throw ValidationError("fit: dataset is empty");
  if (data.inputs.size() != data.targets.size())
    throw ValidationError("fit: inputs and targets differ in length");
  const std::size_t d = data.dims();
  if (d == 0) throw ValidationError("fit: zero-dimensional inputs");
  for (const auto& x : data.inputs) {
    if (x.size() != d) throw ValidationError("fit: ragged input rows");
    for (double v : x)
      if (!std::isfinite(v)) throw ValidationError("fit: non-finite input coordinate");
  }
  for (double t : data.targets)
    if (!std::isfinite(t)) throw ValidationError("fit: non-finite target");

  switch (kind) {
    case SurrogateKind::GP:
      return std::make_unique<GaussianProcess>(data, rng, cfg);
    case SurrogateKind::RF:
      return std::make_unique<ForestModel>(data, rng, random_forest_options(cfg, d));
    case SurrogateKind::ET:
      return std::make_unique<ForestModel>(data, rng, extra_trees_options(cfg));
    case SurrogateKind::GBRT:
      return std::make_unique<GradientBoostedQuantiles>(data, cfg);
  }
  throw ValidationError("fit: unknown surrogate kind");
}

}  // namespace adabo

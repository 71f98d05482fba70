#include "adabo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adabo/errors.hpp"

namespace adabo {

const char* to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::LCB: return "LCB";
    case AcquisitionKind::EI: return "EI";
    case AcquisitionKind::PI: return "PI";
    case AcquisitionKind::GP_HEDGE: return "gp_hedge";
  }
  return "?";
}

AcquisitionKind acquisition_from_string(const std::string& name) {
  if (name == "LCB") return AcquisitionKind::LCB;
  if (name == "EI") return AcquisitionKind::EI;
  if (name == "PI") return AcquisitionKind::PI;
  if (name == "gp_hedge") return AcquisitionKind::GP_HEDGE;
  throw ConfigError("unknown acquisition kind '" + name + "'");
}

void validate(const AcquisitionParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta))
    throw ValidationError("acquisition: beta must be a positive finite number");
  if (!(params.xi >= 0.0) || !std::isfinite(params.xi))
    throw ValidationError("acquisition: xi must be a non-negative finite number");
  if (!(params.hedge_eta > 0.0) || !std::isfinite(params.hedge_eta))
    throw ValidationError("acquisition: hedge_eta must be a positive finite number");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double lcb(const Prediction& pred, const AcquisitionParams& params) {
  return pred.mean - std::sqrt(params.beta) * pred.std;
}

double ei(const Prediction& pred, double f_best, const AcquisitionParams& params) {
  const double gap = f_best - params.xi - pred.mean;
  if (pred.std < kAcqStdFloor) return -std::max(gap, 0.0);
  const double z = gap / pred.std;
  return -(gap * normal_cdf(z) + pred.std * normal_pdf(z));
}

double pi(const Prediction& pred, double f_best, const AcquisitionParams& params) {
  const double gap = f_best - params.xi - pred.mean;
  if (pred.std < kAcqStdFloor) return gap > 0.0 ? -1.0 : 0.0;
  return -normal_cdf(gap / pred.std);
}

double score_acquisition(AcquisitionKind kind, const Prediction& pred, double f_best,
                         const AcquisitionParams& params) {
  switch (kind) {
    case AcquisitionKind::LCB: return lcb(pred, params);
    case AcquisitionKind::EI: return ei(pred, f_best, params);
    case AcquisitionKind::PI: return pi(pred, f_best, params);
    case AcquisitionKind::GP_HEDGE: break;
  }
  throw ValidationError("score_acquisition: needs a concrete acquisition kind");
}

std::array<double, 3> hedge_probabilities(const HedgeState& state,
                                          const AcquisitionParams& params) {
  const double top = *std::max_element(state.gains.begin(), state.gains.end());
  std::array<double, 3> p{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    p[i] = std::exp(params.hedge_eta * (state.gains[i] - top));
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

AcquisitionKind hedge_choose(const HedgeState& state, const AcquisitionParams& params,
                             RandomSource& rng) {
  const auto p = hedge_probabilities(state, params);
  switch (rng.categorical(p)) {
    case 0: return AcquisitionKind::LCB;
    case 1: return AcquisitionKind::EI;
    default: return AcquisitionKind::PI;
  }
}

HedgeState hedge_update(HedgeState state, AcquisitionKind chosen, double mu_at_point) {
  switch (chosen) {
    case AcquisitionKind::LCB: state.gains[0] -= mu_at_point; break;
    case AcquisitionKind::EI: state.gains[1] -= mu_at_point; break;
    case AcquisitionKind::PI: state.gains[2] -= mu_at_point; break;
    case AcquisitionKind::GP_HEDGE:
      throw ValidationError("hedge_update: chosen arm must be concrete");
  }
  return state;
}

ArgminResult argmin_acquisition(const Surrogate& model, AcquisitionKind kind,
                                const AcquisitionParams& params, double f_best,
                                const ParamSpace& space, RandomSource& rng,
                                const ProposalConfig& cfg) {
  if (kind == AcquisitionKind::GP_HEDGE)
    throw ValidationError("argmin_acquisition: needs a concrete acquisition kind");
  if (cfg.candidates < 1) throw ValidationError("argmin_acquisition: needs candidates >= 1");
  const std::size_t d = space.size();

  std::vector<UnitVector> cands(static_cast<std::size_t>(cfg.candidates), UnitVector(d));
  for (auto& c : cands)
    for (auto& v : c) v = rng.uniform();
  const auto preds = model.predict_many(cands);

  std::size_t best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double v = score_acquisition(kind, preds[i], f_best, params);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  UnitVector best = cands[best_i];

  UnitVector probe(d);
  for (int step = 0; step < cfg.refine_steps; ++step) {
    for (std::size_t k = 0; k < d; ++k) {
      const double v = best[k] + cfg.refine_scale * rng.normal();
      probe[k] = std::clamp(v, 0.0, 1.0);
    }
    const double v = score_acquisition(kind, model.predict(probe), f_best, params);
    if (v < best_v) {
      best_v = v;
      best = probe;
    }
  }
  return {space.denormalize(best), best, best_v};
}

}  // namespace adabo

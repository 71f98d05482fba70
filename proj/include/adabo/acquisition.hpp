#pragma once

#include <array>
#include <string>

#include "adabo/random.hpp"
#include "adabo/space.hpp"
#include "adabo/surrogate.hpp"

namespace adabo {

enum class AcquisitionKind { LCB, EI, PI, GP_HEDGE };

const char* to_string(AcquisitionKind kind);
AcquisitionKind acquisition_from_string(const std::string& name);

struct AcquisitionParams {
  double beta = 1.96;
  double xi = 0.01;
  double hedge_eta = 1.0;
};

void validate(const AcquisitionParams& params);

// Cumulative gains for the three concrete acquisitions, indexed LCB, EI, PI.
struct HedgeState {
  std::array<double, 3> gains{0.0, 0.0, 0.0};
};

// Predictions with std below this are treated as exact (the degenerate
// branches of ei/pi); keeps every score finite.
inline constexpr double kAcqStdFloor = 1e-10;

// All three scores share the argmin convention: lower is better.
double lcb(const Prediction& pred, const AcquisitionParams& params);
double ei(const Prediction& pred, double f_best, const AcquisitionParams& params);
double pi(const Prediction& pred, double f_best, const AcquisitionParams& params);

// kind must be one of the three concrete acquisitions.
double score_acquisition(AcquisitionKind kind, const Prediction& pred, double f_best,
                         const AcquisitionParams& params);

// Softmax draw over exp(hedge_eta * gain); one uniform consumed.
AcquisitionKind hedge_choose(const HedgeState& state, const AcquisitionParams& params,
                             RandomSource& rng);

// The chosen arm's probabilities, exposed for distribution tests.
std::array<double, 3> hedge_probabilities(const HedgeState& state,
                                          const AcquisitionParams& params);

// Gain of the chosen arm grows by -mu_at_point; a low surrogate mean at the
// proposal is evidence the arm picked well.
HedgeState hedge_update(HedgeState state, AcquisitionKind chosen, double mu_at_point);

double normal_cdf(double z);
double normal_pdf(double z);

struct ProposalConfig {
  int candidates = 1000;
  int refine_steps = 20;
  double refine_scale = 0.05;
};

struct ArgminResult {
  Point point;      // denormalized winner
  UnitVector unit;  // its unit-cube coordinates
  double value;     // acquisition at unit
};

// Uniform candidate sweep plus Gaussian keep-if-better refinement around the
// best candidate. kind must be concrete (hedge resolves before this call).
ArgminResult argmin_acquisition(const Surrogate& model, AcquisitionKind kind,
                                const AcquisitionParams& params, double f_best,
                                const ParamSpace& space, RandomSource& rng,
                                const ProposalConfig& cfg);

}  // namespace adabo

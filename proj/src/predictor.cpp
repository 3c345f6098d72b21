#include "fcsmpc/predictor.hpp"

namespace fcsmpc {

namespace {

PredictionModel model_over(const PlantParams& params, double dt) {
  params.validate();
  PredictionModel m;
  m.dt = dt;
  m.A = 1.0 - params.R * dt / params.L;
  m.B = params.V_dc * dt / (4.0 * params.L);
  m.validate();
  return m;
}

}  // namespace

PredictionModel full_period_model(const PlantParams& params, double Ts) {
  if (!(Ts > 0.0)) throw std::invalid_argument("full_period_model: Ts must be > 0");
  return model_over(params, Ts);
}

std::vector<PredictionModel> subinterval_models(const PlantParams& params,
                                                const SubintervalGrid& grid) {
  std::vector<PredictionModel> models;
  models.reserve(static_cast<std::size_t>(grid.count()));
  for (int p = 0; p < grid.count(); ++p) models.push_back(model_over(params, grid.dt(p)));
  return models;
}

}  // namespace fcsmpc

#include "edlab/params.hpp"

#include <string>

#include "edlab/error.hpp"

namespace edlab {

void ModelParams::validate(std::size_t dims) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorCode::invalid_argument, "eta must be positive");
  if (!(xi >= 0.0) || !std::isfinite(xi)) fail(ErrorCode::invalid_argument, "xi must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (!std::isfinite(c)) fail(ErrorCode::invalid_argument, "c must be finite");
  if (masses.empty()) fail(ErrorCode::invalid_argument, "at least one particle mass is required");
  if (betas.size() != masses.size()) {
    fail(ErrorCode::invalid_argument, "betas and masses must have one entry per particle");
  }
  for (double m : masses) {
    if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorCode::invalid_argument, "masses must be positive");
  }
  for (double b : betas) {
    if (!std::isfinite(b)) fail(ErrorCode::invalid_argument, "betas must be finite");
  }
  if (axis_particle.size() != dims) {
    fail(ErrorCode::invalid_argument,
         "axis_particle must name a particle for each of the " + std::to_string(dims) + " axes");
  }
  for (std::size_t n : axis_particle) {
    if (n >= masses.size()) fail(ErrorCode::invalid_argument, "axis_particle refers to an unknown particle");
  }
}

}  // namespace edlab

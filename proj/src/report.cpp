#include "choreo/analysis.hpp"

#include <sstream>

namespace choreo {

AnalysisReport analyze(const ChoreographyConfig& config, const AnalysisOptions& options) {
  config.check();
  options.tol.validate();
  const int n = static_cast<int>(config.bodies());
  const bool curved = config.space.is_curved();
  const bool need_equal_spacing = options.modes || options.span || options.nullspace || options.verdict;
  if (need_equal_spacing && !config.offsets.is_equally_spaced()) {
    throw ContractError(
        "mode, span, nullspace and verdict analyses require equally spaced offsets in normal form "
        "h_k = k");
  }

  AnalysisReport r;
  r.n = n;
  r.space = config.space;
  r.central_mass = config.central_mass;
  r.excluded = sample_grid(config, options.samples).excluded;
  r.solution_residual = config_residual(config, options.samples);
  if (r.solution_residual > options.tol.residual_abs) {
    std::ostringstream os;
    os << "config is not a solution to tolerance (residual " << r.solution_residual
       << "); identity residuals are not meaningful";
    r.warnings.push_back(os.str());
  }

  if (options.span || options.verdict) r.span = span_dimension(config, options.samples, options.tol.rank_rel);
  if (config.offsets.is_equally_spaced()) {
    r.simplex = simplex_test(config, options.samples);
    if (!curved && r.span) r.collinear = r.span->d <= 1;
  }
  if (curved) r.great_circle = great_circle_test(config, options.samples, options.tol.rank_rel);

  if (options.modes) {
    for (int l = 1; l < n; ++l) {
      if (curved) {
        ModeResidual m;
        m.l = l;
        m.with_f = mode_residual_curved(config, l, options.samples);
        r.modes.push_back(m);
      } else {
        r.modes.push_back(mode_residual_flat(config, l, options.samples));
      }
    }
  }

  if (options.nullspace || options.verdict) r.nullspace = mass_feasibility(config, options.samples, options.tol);

  if (options.verdict) {
    const VerdictInputs in{.n = n,
                           .curved = curved,
                           .sigma = curved ? config.space.sigma() : 0,
                           .d = r.span->d,
                           .fixed_center = config.central_mass > 0.0,
                           .great_circle = r.great_circle};
    r.verdict = theorem_verdict(in, *r.nullspace);
    if (!r.verdict->consistent) {
      r.warnings.push_back("computed nullspace leaves the predicted subspace (numerical finding)");
    }
  }

  if (options.symmetry) {
    if (curved || config.path.dim() != 2) {
      r.warnings.push_back("symmetry identities skipped: they need a flat planar config");
    } else {
      for (std::size_t k = 0; k < config.bodies(); ++k) {
        for (std::size_t l = k + 1; l < config.bodies(); ++l) {
          r.symmetry.push_back(symmetry_identities(config, k, l, options.samples));
        }
      }
    }
  }
  return r;
}

}  // namespace choreo

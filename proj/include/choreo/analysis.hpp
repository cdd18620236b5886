#pragma once

#include "choreo/choreography.hpp"

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace choreo {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Spectral basis and mass modes
// ---------------------------------------------------------------------------

/// e_l with component j (0-based) equal to exp(2 pi i l j / n) / sqrt(n),
/// eigenvalues lambda_l = exp(2 pi i l / n), and the cyclic up-shift
/// (B x)_j = x_{j+1}, so that B e_l = lambda_l e_l. Modes are labelled
/// l = 1..n; l = n is the constant vector.
struct SpectralBasis {
  int n = 0;
  Eigen::MatrixXcd vectors;  // column l - 1 holds e_l
  CVec eigenvalues;          // entry l - 1 holds lambda_l
  Eigen::MatrixXd shift;

  /// Any integer l, reduced mod n (l = 0 means l = n).
  CVec e(int l) const;
  cplx lambda(int l) const;
};

SpectralBasis dft_basis(int n);

/// lambda_l^power without accumulating round-off.
cplx root_power(int n, int l, long power);

/// a_l = <e_l, mu> for l = 1..n-1, where mu is the mass deviation vector.
struct ModeCoefficients {
  int n = 0;
  std::vector<cplx> a;  // entry l - 1 holds a_l

  cplx at(int l) const { return a[static_cast<std::size_t>(l - 1)]; }
  /// sum_l a_l e_l (real part; the imaginary part vanishes for real masses).
  Vec reconstruct() const;
};

ModeCoefficients mass_modes(const MassVector& masses);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SampleGrid {
  std::vector<double> times;
  /// Sample times dropped because two bodies (or a body and the fixed
  /// center) came closer than the separation floor.
  std::vector<double> excluded;
};

inline constexpr int kDefaultSamples = 128;
inline constexpr double kSeparationFloor = 1e-8;

/// Uniform grid over one period of the path.
SampleGrid sample_grid(const ChoreographyConfig& config, int sample_count = kDefaultSamples);

// ---------------------------------------------------------------------------
// Delta vectors, span dimension, degeneracy tests
// ---------------------------------------------------------------------------

/// Column j - 1 holds Delta_j(t) = p(t + j) - p(t), j = 1..n-1.
Positions delta_vectors(const ChoreographyConfig& config, double t);

struct SpanResult {
  int d = 0;
  /// rank -> fraction of retained samples with that rank.
  std::map<int, double> histogram;
  std::vector<int> ranks;
  std::vector<double> excluded;
};

SpanResult span_dimension(const ChoreographyConfig& config, int sample_count = kDefaultSamples,
                          double rank_rel = Tolerances{}.rank_rel);

/// True iff every sampled | |Delta_a| - |Delta_b| | is below tol.
bool simplex_test(const ChoreographyConfig& config, int sample_count = kDefaultSamples,
                  double tol = 1e-8);

/// Sphere: true iff all sampled positions lie in one plane through the
/// origin. Hyperboloid: always false.
bool great_circle_test(const ChoreographyConfig& config, int sample_count = kDefaultSamples,
                       double rank_rel = Tolerances{}.rank_rel);

// ---------------------------------------------------------------------------
// Linear identities and mode residuals
// ---------------------------------------------------------------------------

/// Coefficient of Delta_j in the shift-k identities: m_{k+j} - M/n with the
/// 0-based cyclic mass index, j = 1..n-1.
double shift_coefficient(const MassVector& masses, long k, int j);

struct IdentityVectors {
  Vec with_f;
  Vec without_f;
};

/// sum_j (m_{k+j} - M/n) Delta_j f(|Delta_j|^2) and the same sum without f.
IdentityVectors lemma1_vectors(const ChoreographyConfig& config, long k, double t);

struct IdentityNorms {
  double with_f = 0.0;
  double without_f = 0.0;
};

/// Max over the sample grid of the two identity norms.
IdentityNorms lemma1_residual(const ChoreographyConfig& config, long k,
                              int sample_count = kDefaultSamples);

/// Column j - 1 holds V_j(t) = (p(t+j) - s (p(t+j).p(t)) p(t)) / (s - s (p(t+j).p(t))^2)^(3/2)
/// with the signed product of the curved space. Throws DomainError naming t
/// and j at a singular separation.
Positions curved_pair_terms(const ChoreographyConfig& config, double t);

Vec lemma3_vector(const ChoreographyConfig& config, long k, double t);
double lemma3_residual(const ChoreographyConfig& config, long k, int sample_count = kDefaultSamples);

struct ModeVectors {
  CVec with_f;
  CVec without_f;
};

/// W_l(t) = sum_j lambda_l^(j-1) Delta_j f(|Delta_j|^2) and its f-free analogue.
ModeVectors mode_vectors_flat(const ChoreographyConfig& config, int l, double t);

struct ModeResidual {
  int l = 0;
  double with_f = 0.0;
  double without_f = 0.0;
  /// Even n only: entry k (k = 0..n-1) is the max norm of
  /// sum_{j != k, k + n/2} sin(2 pi l (k - j) / n) Delta_j [f(|Delta_j|^2)].
  std::vector<double> sine_with_f;
  std::vector<double> sine_without_f;
};

ModeResidual mode_residual_flat(const ChoreographyConfig& config, int l,
                                int sample_count = kDefaultSamples);

/// sum_j lambda_l^(j-1) V_j(t).
CVec mode_vector_curved(const ChoreographyConfig& config, int l, double t);
double mode_residual_curved(const ChoreographyConfig& config, int l,
                            int sample_count = kDefaultSamples);

// ---------------------------------------------------------------------------
// Mass feasibility
// ---------------------------------------------------------------------------

struct FeasibilityResult {
  int nullspace_dim = 0;
  /// n x nullspace_dim orthonormal basis of admissible mass deviations.
  Eigen::MatrixXd basis;
  /// Descending.
  Vec singular_values;
  /// "rigid", "alternating" or "other".
  std::string classification;
  /// Smallest retained singular value over the largest discarded one (or
  /// over the cutoff when nothing is discarded).
  double spectral_gap = 0.0;
  std::size_t rows = 0;
  std::vector<double> excluded;
};

/// Stacks, for every retained sample t and shift k, the identities as linear
/// equations in the deviations mu (flat: with and without f; curved: the
/// curved identity), appends sum mu = 0, and reads the nullspace off the SVD.
/// The config's masses are not used. Throws ContractError when fewer
/// samples than unknowns remain.
FeasibilityResult mass_feasibility(const ChoreographyConfig& config,
                                   int sample_count = kDefaultSamples,
                                   const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Reflection-symmetric choreographies
// ---------------------------------------------------------------------------

struct SymmetryIdentities {
  std::size_t k = 0;
  std::size_t l = 0;
  /// Max-norm mismatch of each identity over the sample grid, in order:
  /// with f, with f shifted to p(t + h_l - h_k), without f, without f shifted.
  std::array<double, 4> residuals{};
  /// Least-squares estimates of m_k - m_l implied by the first and third
  /// identities.
  double implied_difference_with_f = 0.0;
  double implied_difference_without_f = 0.0;
  /// max_t max(|implied differences|) * |p(t + h_l - h_k) - p(t)|.
  double certificate = 0.0;
  SymmetryAxis axis;
};

/// Evaluates the four pair identities on the reflection normal form of the
/// path. Offsets need not be equally spaced. Throws ContractError when the
/// path has no symmetry axis.
SymmetryIdentities symmetry_identities(const ChoreographyConfig& config, std::size_t k,
                                       std::size_t l, int sample_count = kDefaultSamples,
                                       const SymmetryOptions& options = {});

// ---------------------------------------------------------------------------
// Verdicts and reports
// ---------------------------------------------------------------------------

struct VerdictInputs {
  int n = 0;
  bool curved = false;
  int sigma = 0;
  int d = 0;
  bool fixed_center = false;
  bool great_circle = false;
};

struct Verdict {
  std::string text;
  /// False when the configuration lies outside every covered case.
  bool has_prediction = false;
  /// n x a orthonormal basis of the mass deviations the prediction allows.
  Eigen::MatrixXd allowed;
  /// Computed nullspace inside the allowed subspace (always true without a
  /// prediction).
  bool consistent = true;
};

Verdict theorem_verdict(const VerdictInputs& inputs, const FeasibilityResult& feasibility);

struct AnalysisOptions {
  int samples = kDefaultSamples;
  Tolerances tol;
  bool modes = true;
  bool span = true;
  bool nullspace = true;
  bool symmetry = false;
  bool verdict = true;
};

struct AnalysisReport {
  int n = 0;
  Space space = Space::flat(2);
  double central_mass = 0.0;
  std::optional<SpanResult> span;
  /// Flat: both identity norms. Curved: with_f holds the curved norm and
  /// without_f is unused.
  std::vector<ModeResidual> modes;
  std::optional<FeasibilityResult> nullspace;
  bool simplex = false;
  bool great_circle = false;
  bool collinear = false;
  std::optional<Verdict> verdict;
  /// Every pair k < l when the symmetry analysis was requested.
  std::vector<SymmetryIdentities> symmetry;
  double solution_residual = 0.0;
  std::vector<double> excluded;
  std::vector<std::string> warnings;
};

AnalysisReport analyze(const ChoreographyConfig& config, const AnalysisOptions& options = {});

}  // namespace choreo

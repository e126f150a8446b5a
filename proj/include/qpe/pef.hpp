#pragma once

#include "qpe/certify.hpp"
#include "qpe/models.hpp"
#include "qpe/trial_function.hpp"

#include <array>
#include <vector>

namespace qpe {

// Non-signaling two-station distributions cut at CHSH = 2√2 for each of the
// eight CHSH variants: the 16 local deterministic points and, for every PR
// box, the points where its segments to the other 23 extreme points meet
// the cut.
std::vector<TrialDistribution> tsirelson_cut_vertices(const std::vector<double>& input_dist);
// The eight PR boxes a ⊕ b = xy ⊕ ux ⊕ vy ⊕ w, indexed by u + 2v + 4w.
std::vector<TrialDistribution> pr_boxes(const std::vector<double>& input_dist);
// Σ_xy (−1)^{xy⊕ux⊕vy⊕w} E_xy, the CHSH variant maximized by PR box i.
double chsh_variant(const TrialDistribution& nu, int i);

struct PefOptions {
  int max_iters = 200000;
  double rate_tol = 1e-10;  // stop when the duality gap divided by β is below this
};

struct PefResult {
  TrialFunction F;            // normalized: max over vertices of Σ μ(z) F ν_v(c|z)^α is 1
  double rate = 0.0;          // Σ ν log F / β, nats per trial
  double rate_bits = 0.0;
  double gap = 0.0;           // duality gap bound on the rate
  int iterations = 0;
};

// Maximizes Σ ν log F subject to Σ_cz μ(z) F(cz) ν_v(c|z)^α ≤ 1 at every
// vertex, by multiplicative updates on the dual mixture weights.
PefResult optimize_pef_polytope(const TrialDistribution& nu, double beta,
                                const std::vector<TrialDistribution>& vertices, const PefOptions& opts = {});
PefResult optimize_pef_polytope(const TrialDistribution& nu, double beta, const PefOptions& opts = {});

// Largest vertex value Σ μ(z) F(cz) ν_v(c|z)^α.
double pef_polytope_max(const TrialFunction& F, const std::vector<TrialDistribution>& vertices);

// Σ_cz μ(z) F(cz) (yᵀ P_{c|z;θ} y)^α for a real unit vector y.
double q_alpha_pure(const TrialFunction& F, const BellConfig& config, const RVec& y);

struct FacetCone {
  std::vector<RVec> vertices;
  double eps = 0.0;  // 1 − min pairwise inner product
  explicit FacetCone(std::vector<RVec> v);
  double min_overlap() const { return 1.0 - eps; }
};

// max_i q_i / (1 − ε)^α with q_i the pure-state values at the cone's vertices.
double facet_bound(const TrialFunction& F, const BellConfig& config, const FacetCone& facet);

// ρ′ = Σ λ′_i x_i x_iᵀ / (x_iᵀ y) where y = Σ λ′_i x_i is the unit vector along
// Σ λ_i x_i; it satisfies ρ′ ≥ y yᵀ and tr ρ′ ≤ 1/(1 − ε).
RMat cone_witness(const FacetCone& facet, const std::vector<double>& lambda, RVec* y = nullptr);

// Point on S₃: sin φ₁ (sin φ₂, cos φ₂, 0, 0) + cos φ₁ (0, 0, sin φ₃, cos φ₃).
RVec s3_point(double phi1, double phi2, double phi3);

struct PefCertifyOptions {
  double gap_target = 1e-4;
  long long budget = 2000000;
  int m_state = 3;  // initial intervals of length π/(2m) on the state angles
  int m_theta = 4;  // initial intervals per measurement angle
  int max_depth = 16;
  double slack = 1e-9;
};

// Certified bounds on max over θ ∈ [0,π]² and real pure states of
// Σ μ(z) F(cz) (yᵀ P y)^α for k = 2.
CertificationResult certify_pef_fmax(const TrialFunction& F, const BellConfig& config,
                                     const PefCertifyOptions& opts = {});

}  // namespace qpe

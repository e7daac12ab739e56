#pragma once

#include <string>

namespace adagmrf {

enum class LinkKind { probit, logit, student_t, laplace };

// Link function H, a symmetric CDF that is a scale mixture of normal CDFs.
struct Link {
  LinkKind kind = LinkKind::probit;
  double df = 0.0;  // student_t only

  static Link probit() { return {LinkKind::probit, 0.0}; }
  static Link logit() { return {LinkKind::logit, 0.0}; }
  static Link student_t(double df) { return {LinkKind::student_t, df}; }
  static Link laplace() { return {LinkKind::laplace, 0.0}; }

  // H(z) = P(y = 1 | z)
  double cdf(double z) const;

  bool is_scale_mixture() const {
    return kind == LinkKind::student_t || kind == LinkKind::laplace;
  }

  std::string name() const;
};

// Parses "probit", "logit", "laplace", "student-t" / "student-t:<df>".
Link parse_link(const std::string& text, double default_df = 1.0);

struct ModelSpec {
  Link link = Link::probit();
  // Degrees of freedom of the local-variance prior, 1/gamma^2 ~ Gamma(nu/2, nu/2).
  double nu = 1.0;
  // Half-t prior on the global scale: degrees of freedom and scale.
  double rho = 1.0;
  double scale = 1.0;
  // Prior miscoding probability; 0 disables robustification.
  double miscoding = 0.0;
  // false freezes every gamma^2 at 1 (thin-plate GMRF).
  bool adaptive = true;
  // Proper prior precision on boundary nodes, which the interior stencil
  // leaves unconstrained. With 0 (intrinsic prior) the expanded posterior is
  // improper in xi: long chains drift to xi -> 0 and the field factorization
  // eventually breaks down.
  double boundary_precision = 0.01;

  // Throws DomainError when a field is outside its admissible range.
  void validate() const;
};

// P(psi = 1 | y, z) for one voxel given h = H(z) and its complement
// hc = 1 - H(z) (passed separately so extreme z keeps full precision).
double miscoding_probability(int y, double h, double hc, double r);

inline double miscoding_probability(int y, double h, double r) {
  return miscoding_probability(y, h, 1.0 - h, r);
}

}  // namespace adagmrf

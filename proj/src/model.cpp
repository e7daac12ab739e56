#include "adagmrf/model.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "adagmrf/errors.hpp"

namespace adagmrf {

double Link::cdf(double z) const {
  switch (kind) {
    case LinkKind::probit:
      return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    case LinkKind::logit:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                      : std::exp(z) / (1.0 + std::exp(z));
    case LinkKind::student_t:
      return boost::math::cdf(boost::math::students_t_distribution<>(df), z);
    case LinkKind::laplace:
      return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  }
  return 0.0;
}

std::string Link::name() const {
  switch (kind) {
    case LinkKind::probit:
      return "probit";
    case LinkKind::logit:
      return "logit";
    case LinkKind::student_t: {
      std::string s = std::to_string(df);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "student-t:" + s;
    }
    case LinkKind::laplace:
      return "laplace";
  }
  return "unknown";
}

Link parse_link(const std::string& text, double default_df) {
  if (text == "probit") return Link::probit();
  if (text == "logit") return Link::logit();
  if (text == "laplace") return Link::laplace();
  if (text == "student-t" || text == "student_t")
    return Link::student_t(default_df);
  for (const std::string prefix : {"student-t:", "student_t:"}) {
    if (text.rfind(prefix, 0) == 0) {
      try {
        return Link::student_t(std::stod(text.substr(prefix.size())));
      } catch (const std::exception&) {
        break;
      }
    }
  }
  throw DomainError("unknown link '" + text + "'");
}

void ModelSpec::validate() const {
  if (link.kind == LinkKind::student_t && !(link.df > 0.0))
    throw DomainError("student-t link needs df > 0");
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (!(miscoding >= 0.0 && miscoding < 1.0))
    throw DomainError("miscoding probability must lie in [0, 1)");
  if (!(boundary_precision >= 0.0))
    throw DomainError("boundary precision must be non-negative");
}

double miscoding_probability(int y, double h, double hc, double r) {
  if (r == 0.0) return 0.0;
  // y = 1: miscoded means the truth is "no peak"; y = 0 the reverse.
  const double miss = y == 1 ? r * hc : r * h;
  const double keep = y == 1 ? (1.0 - r) * h : (1.0 - r) * hc;
  const double total = miss + keep;
  return total > 0.0 ? miss / total : r;
}

}  // namespace adagmrf

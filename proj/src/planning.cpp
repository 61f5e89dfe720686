#include "xover/planning.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "xover/error.hpp"

namespace xover {

void PlanInputs::validate() const {
    if (tau0 == 0.0) throw ValidationError("undetectable difference: tau0 must be nonzero");
    if (!(tau0 > 0.0)) throw ValidationError("tau0 must be > 0");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
    if (!(power > 0.0 && power < 1.0)) throw ValidationError("power must lie in (0,1)");
    if (n3 < 0 || n2 < 0 || n3 + n2 < 1) throw ValidationError("need at least one patient");
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile probability must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

int required_observations(const PlanInputs& inputs) {
    inputs.validate();
    const double z = normal_quantile(1.0 - inputs.alpha / 2.0) + normal_quantile(inputs.power);
    const double root_m = z * inputs.sigma / inputs.tau0;
    return static_cast<int>(std::ceil(root_m * root_m));
}

int required_weeks(int m, int n3, int n2, bool round_even) {
    if (m < 1) throw ValidationError("m must be >= 1");
    const int per_week = 3 * n3 + 2 * n2;
    if (per_week < 1) throw ValidationError("3*N3 + 2*N2 must be >= 1");
    int w = (m + per_week - 1) / per_week;
    if (round_even && w % 2 != 0) ++w;
    return w;
}

double estimator_variance(int weeks, int n3, int n2, double sigma) {
    if (weeks < 1) throw ValidationError("weeks must be >= 1");
    const int per_week = 3 * n3 + 2 * n2;
    if (per_week < 1) throw ValidationError("3*N3 + 2*N2 must be >= 1");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    return sigma * sigma / (static_cast<double>(weeks) * per_week);
}

}  // namespace xover

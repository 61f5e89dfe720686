#pragma once

namespace xover {

// Inputs for the normal-approximation sample-size calculation. tau0 is the
// semi-treatment difference to detect (the H-vs-A mean difference is 2*tau0).
struct PlanInputs {
    double tau0 = 0.0;
    double sigma = 0.0;
    double alpha = 0.05;   // two-sided size
    double power = 0.80;
    int n3 = 0;
    int n2 = 0;

    void validate() const;
};

double normal_quantile(double p);

// m = ceil( ((z_{1-alpha/2} + z_power) * sigma / tau0)^2 ).
int required_observations(const PlanInputs& inputs);

// w = ceil(m / (3*N3 + 2*N2)), optionally rounded up to the next even week
// count (even w is what the sequence construction needs).
int required_weeks(int m, int n3, int n2, bool round_even);

// Variance of the treatment-effect estimator under an optimal design:
// sigma^2 / (w * (3*N3 + 2*N2)).
double estimator_variance(int weeks, int n3, int n2, double sigma);

}  // namespace xover

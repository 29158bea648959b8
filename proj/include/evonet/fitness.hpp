#pragma once

#include <span>
#include <string_view>

#include "evonet/errors.hpp"

namespace evonet {

enum class Measure { Sqe, Abs, Exp, Prechelt };

Measure measure_from_name(std::string_view name);
std::string_view measure_name(Measure m);

// sum over i of (t_i - a_i)^2
double error_sqe(std::span<const double> targets, std::span<const double> actuals);
// sum over i of |t_i - a_i|
double error_abs(std::span<const double> targets, std::span<const double> actuals);
// sum over i of e^|t_i - a_i|; the floor is the number of terms
double error_exp(std::span<const double> targets, std::span<const double> actuals);

// Error normalization spec for the percentage measure. O_max/O_min bound the
// output range, n counts output neurons, t counts validation patterns.
struct FitnessSpec {
    Measure measure = Measure::Sqe;
    double o_max = 1.0;
    double o_min = 0.0;
    int n_outputs = 1;
    int t_patterns = 1;

    void validate() const;
};

// 100 * (O_max - O_min) / n * E_sqe / T, exactly in that form
double error_prechelt(const FitnessSpec& spec, double e_sqe);

// Training-attempt marking: success iff the error strictly decreased.
// Ties mark failure. NaN on either side is a numeric error.
bool mark_success(double error_before, double error_after);

}  // namespace evonet

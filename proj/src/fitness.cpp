#include "evonet/fitness.hpp"

#include <cmath>
#include <string>

namespace evonet {

Measure measure_from_name(std::string_view name) {
    if (name == "sqe") return Measure::Sqe;
    if (name == "abs") return Measure::Abs;
    if (name == "exp") return Measure::Exp;
    if (name == "prechelt") return Measure::Prechelt;
    throw ParamError("unknown fitness measure: " + std::string(name));
}

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::Sqe: return "sqe";
        case Measure::Abs: return "abs";
        case Measure::Exp: return "exp";
        case Measure::Prechelt: return "prechelt";
    }
    return "sqe";
}

namespace {

void check_lengths(std::span<const double> t, std::span<const double> a) {
    if (t.size() != a.size())
        throw DimensionError("target/actual length mismatch: " + std::to_string(t.size()) +
                             " vs " + std::to_string(a.size()));
    if (t.empty()) throw DimensionError("error measure needs at least one value");
}

}  // namespace

double error_sqe(std::span<const double> targets, std::span<const double> actuals) {
    check_lengths(targets, actuals);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double d = targets[i] - actuals[i];
        sum += d * d;
    }
    return sum;
}

double error_abs(std::span<const double> targets, std::span<const double> actuals) {
    check_lengths(targets, actuals);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) sum += std::abs(targets[i] - actuals[i]);
    return sum;
}

double error_exp(std::span<const double> targets, std::span<const double> actuals) {
    check_lengths(targets, actuals);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) sum += std::exp(std::abs(targets[i] - actuals[i]));
    return sum;
}

void FitnessSpec::validate() const {
    if (n_outputs < 1) throw ParamError("fitness spec: n_outputs must be >= 1");
    if (t_patterns < 1) throw ParamError("fitness spec: t_patterns must be >= 1");
    if (measure == Measure::Prechelt && !(o_max > o_min))
        throw ParamError("fitness spec: o_max must exceed o_min for the prechelt measure");
}

double error_prechelt(const FitnessSpec& spec, double e_sqe) {
    spec.validate();
    if (e_sqe < 0.0) throw ParamError("prechelt: negative squared error");
    return 100.0 * (spec.o_max - spec.o_min) / static_cast<double>(spec.n_outputs) * e_sqe /
           static_cast<double>(spec.t_patterns);
}

bool mark_success(double error_before, double error_after) {
    if (std::isnan(error_before) || std::isnan(error_after))
        throw NumericError("mark: NaN error value");
    return error_after < error_before;
}

}  // namespace evonet

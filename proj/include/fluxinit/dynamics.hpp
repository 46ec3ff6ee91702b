#pragma once

#include <span>
#include <string>
#include <vector>

#include "fluxinit/pulse_shaping.hpp"
#include "fluxinit/reduced_model.hpp"

namespace fluxinit {

/// Populations sampled on the schedule grid.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> populations;  // [state][sample]
    /// Population that has reached the target ground state. For the reduced model
    /// this is the lost norm 1 - (P_a + P_b + P_c).
    std::vector<double> p_ground;
    std::vector<std::string> warnings;

    /// Throws ErrorKind::IndexOutOfRange for an unknown label.
    const std::vector<double>& series(const std::string& label) const;
    double final_value(const std::string& label) const { return series(label).back(); }
    double final_ground() const { return p_ground.back(); }
    double final_excited() const { return 1.0 - p_ground.back(); }
};

/// Integrates i d/dt psi = H(t) psi with the rotating-frame generator, Omega_ef
/// taken from the schedule, by classical RK4 stepping between schedule samples.
/// `initial` must be normalized. Throws ErrorKind::Numerical if the state
/// becomes non-finite.
Trajectory evolve_reduced(const ReducedParams& p, const ControlSchedule& schedule,
                          const Vector3c& initial, TripleKind kind = TripleKind::Red);

/// Same dynamics from the lab-frame generator (interaction picture with respect to
/// the bare energies, counter-rotating terms kept). RK4 substeps of at most `dt` ns.
Trajectory evolve_reduced_lab(const ReducedParams& p, const ControlSchedule& schedule,
                              const Vector3c& initial, double dt = 0.005,
                              TripleKind kind = TripleKind::Red);

struct ErrorMap {
    std::vector<double> omegas;     // plateau Omega_ef, GHz
    std::vector<double> durations;  // T, ns
    std::vector<std::vector<double>> errors;   // [omega][duration], 1 - P_ground(final)
    std::vector<std::vector<double>> leakage;  // [omega][duration], P_b(final)
};

struct MapSettings {
    RampSpec ramp;   // T is overwritten per cell
    double T_pre = 10.0;
    int jobs = 1;
};

/// One evolve_reduced per (Omega, T) from the first state of the triple. p.Omega_ef
/// is ignored. Cell failures are rethrown with their (row, column) indices.
ErrorMap initialization_error_map(const ReducedParams& p, std::span<const double> omegas,
                                  std::span<const double> durations, const MapSettings& settings);

struct DecayTimeFit {
    double tau = 0.0;        // ns
    double amplitude = 0.0;  // error extrapolated to T = 0
    double max_relative_residual = 0.0;
    std::size_t samples_used = 0;
    bool poor_fit = false;   // max relative residual > 0.2
};

/// Least-squares slope of log(error) against T over samples with T >= min_duration.
/// Needs at least 4 such samples, all errors positive.
DecayTimeFit extract_decay_time(std::span<const double> durations, std::span<const double> errors,
                                double min_duration = 0.0);

struct LeakageRemovalCurve {
    std::vector<double> t_pre;
    std::vector<double> efficiency;  // 1 - P_b(final)
    std::vector<double> excited;     // P_a + P_b + P_c (final)
    std::vector<double> p_a;
    std::vector<double> p_b;
    std::vector<double> p_c;
};

/// Final populations after the full schedule started from the leakage state |b>
/// (|f0> for red), for each pre-drive interval.
LeakageRemovalCurve leakage_removal_efficiency(const ReducedParams& p, const RampSpec& ramp,
                                               double plateau, std::span<const double> t_pre,
                                               int jobs = 1);

/// Mean spacing of interior local maxima (parabolic sub-sample refinement).
/// Returns 0 when fewer than two maxima exist.
double oscillation_period(std::span<const double> x, std::span<const double> y);

/// Gamma_up / (Gamma_up + Gamma_init) with Gamma_up = n_th / T1. T1 in us, Gamma_init in 1/ns.
double steady_state_error(double n_th, double T1_us, double Gamma_init);

/// Runs `count` independent tasks on up to `jobs` threads; exceptions from the
/// lowest-index failing task are rethrown after all workers join.
template <typename F>
void parallel_for(std::size_t count, int jobs, F&& task);

}  // namespace fluxinit

#include "fluxinit/detail/parallel.hpp"

#pragma once

#include <vector>

#include "qsweep/fields.hpp"
#include "qsweep/trajectories.hpp"

namespace qsweep {

// Data-parallel kernels.  Every element (grid point, trajectory) is an
// independent pure computation, so the OpenMP versions must produce results
// bit-identical to the serial references; the tests enforce that and the
// benchmark target compares their throughput.

// Field samples over a fixed-time grid.
std::vector<FieldSample> scan_fields_serial(const TwoChannelField& field,
                                            const std::vector<double>& xs, double t);
std::vector<FieldSample> scan_fields(const TwoChannelField& field,
                                     const std::vector<double>& xs, double t,
                                     int threads = 0);

// Batch trajectory integration; output order matches the launch order
// regardless of scheduling.
std::vector<Trajectory> integrate_batch_serial(const std::vector<LaunchPoint>& launches,
                                               const TwoChannelField& field,
                                               const ScreenGeometry& geom,
                                               const IntegratorConfig& config);
std::vector<Trajectory> integrate_batch(const std::vector<LaunchPoint>& launches,
                                        const TwoChannelField& field,
                                        const ScreenGeometry& geom,
                                        const IntegratorConfig& config,
                                        int threads = 0);

int max_threads();

} // namespace qsweep

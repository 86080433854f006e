// Timing comparison of the serial reference kernels against the OpenMP ones.
// Usage: qsweep_bench [grid_points] [trajectories_per_slit]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "qsweep/batch.hpp"
#include "qsweep/setup.hpp"

using namespace qsweep;

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    const int grid_points = (argc > 1) ? std::atoi(argv[1]) : 2'000'000;
    const int n_per_slit = (argc > 2) ? std::atoi(argv[2]) : 128;

    const ExperimentSetup setup =
        build_setup(1.675e-27, 1.8e-9, 200e-6, 1e-6, 5.0, 3e-3);
    PacketParams s1, s2;
    s1.center = setup.slit1_center();
    s2.center = setup.slit2_center();
    s2.weight = 1e-4; // sqrt(1e-8)
    const TwoChannelField field{s1, s2, CoherenceMode::Coherent, 1e-300};

    std::printf("threads available: %d\n", max_threads());

    // field scan kernel
    std::vector<double> xs(grid_points);
    const double half = 12.0 * dispersed_sigma(s1, setup.screen_time_internal());
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = -half + 2.0 * half * i / (grid_points - 1);
    }
    std::vector<FieldSample> serial_scan, parallel_scan;
    const double t_scan = setup.screen_time_internal();
    const double serial_s = time_seconds([&] {
        serial_scan = scan_fields_serial(field, xs, t_scan);
    });
    const double parallel_s = time_seconds([&] {
        parallel_scan = scan_fields(field, xs, t_scan);
    });
    bool identical = true;
    for (std::size_t i = 0; i < serial_scan.size(); ++i) {
        identical = identical && serial_scan[i].Ptot == parallel_scan[i].Ptot
                              && serial_scan[i].vtot == parallel_scan[i].vtot;
    }
    std::printf("field scan   %9d pts   serial %8.3f s   omp %8.3f s   speedup %5.2fx   %s\n",
                grid_points, serial_s, parallel_s, serial_s / parallel_s,
                identical ? "bit-identical" : "MISMATCH");

    // trajectory batch kernel
    const std::vector<LaunchPoint> launches = launch_positions(s1, s2, n_per_slit);
    const ScreenGeometry geom = screen_geometry(setup);
    IntegratorConfig cfg;
    std::vector<Trajectory> serial_tr, parallel_tr;
    const double serial_t = time_seconds([&] {
        serial_tr = integrate_batch_serial(launches, field, geom, cfg);
    });
    const double parallel_t = time_seconds([&] {
        parallel_tr = integrate_batch(launches, field, geom, cfg);
    });
    identical = serial_tr.size() == parallel_tr.size();
    for (std::size_t i = 0; identical && i < serial_tr.size(); ++i) {
        identical = serial_tr[i].points.size() == parallel_tr[i].points.size()
                 && serial_tr[i].back().x == parallel_tr[i].back().x;
    }
    std::printf("trajectories %9d       serial %8.3f s   omp %8.3f s   speedup %5.2fx   %s\n",
                2 * n_per_slit, serial_t, parallel_t, serial_t / parallel_t,
                identical ? "bit-identical" : "MISMATCH");
    return 0;
}

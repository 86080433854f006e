#include "qsweep/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsweep {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<FieldSample> scan_fields_serial(const TwoChannelField& field,
                                            const std::vector<double>& xs, double t) {
    std::vector<FieldSample> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = field.sample(xs[i], t);
    }
    return out;
}

std::vector<FieldSample> scan_fields(const TwoChannelField& field,
                                     const std::vector<double>& xs, double t,
                                     int threads) {
    std::vector<FieldSample> out(xs.size());
    const long n = static_cast<long>(xs.size());
#ifdef _OPENMP
    if (threads > 0) {
        #pragma omp parallel for schedule(static) num_threads(threads)
        for (long i = 0; i < n; ++i) out[i] = field.sample(xs[i], t);
    } else {
        #pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) out[i] = field.sample(xs[i], t);
    }
#else
    (void)threads;
    for (long i = 0; i < n; ++i) out[i] = field.sample(xs[i], t);
#endif
    return out;
}

std::vector<Trajectory> integrate_batch_serial(const std::vector<LaunchPoint>& launches,
                                               const TwoChannelField& field,
                                               const ScreenGeometry& geom,
                                               const IntegratorConfig& config) {
    std::vector<Trajectory> out(launches.size());
    for (std::size_t i = 0; i < launches.size(); ++i) {
        out[i] = integrate(launches[i].x0, launches[i].slit, field, geom, config);
    }
    return out;
}

std::vector<Trajectory> integrate_batch(const std::vector<LaunchPoint>& launches,
                                        const TwoChannelField& field,
                                        const ScreenGeometry& geom,
                                        const IntegratorConfig& config,
                                        int threads) {
    std::vector<Trajectory> out(launches.size());
    const long n = static_cast<long>(launches.size());
#ifdef _OPENMP
    if (threads > 0) {
        #pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long i = 0; i < n; ++i) {
            out[i] = integrate(launches[i].x0, launches[i].slit, field, geom, config);
        }
    } else {
        #pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            out[i] = integrate(launches[i].x0, launches[i].slit, field, geom, config);
        }
    }
#else
    (void)threads;
    for (long i = 0; i < n; ++i) {
        out[i] = integrate(launches[i].x0, launches[i].slit, field, geom, config);
    }
#endif
    return out;
}

} // namespace qsweep

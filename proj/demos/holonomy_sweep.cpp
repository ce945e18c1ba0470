// Sweeps the holonomy along the moment coordinate of the cylinder and the
// disk and prints a CSV: x, Re Q, Im Q (formula), |formula - transport|.
#include <cstdio>

#include "gq/gq.hpp"

int main() {
    gq::NumericsConfig cfg;
    const auto cylinder = gq::make_model(gq::ModelSpec::cylinder());
    const auto disk = gq::make_model(gq::ModelSpec::disk());

    std::printf("model,x,re_q,im_q,formula_vs_transport\n");
    for (int i = 0; i <= 60; ++i) {
        const double x = -1.5 + i * 0.05;
        const gq::OrbitSample orbit{{x, 0.0}, cylinder->generator_id(1)};
        const auto f = gq::holonomy_formula(*cylinder, orbit);
        const auto t = gq::holonomy_transport(*cylinder, orbit, cfg);
        std::printf("cylinder,%.6f,%.12f,%.12f,%.3e\n", x, f.value.real(), f.value.imag(),
                    std::abs(f.value - t.value));
    }
    for (int i = 1; i <= 40; ++i) {
        const double r = i * 0.05;
        const gq::OrbitSample orbit{{r, 0.0}, disk->generator_id(1)};
        const auto f = gq::holonomy_formula(*disk, orbit);
        const auto t = gq::holonomy_transport(*disk, orbit, cfg);
        std::printf("disk,%.6f,%.12f,%.12f,%.3e\n", r * r, f.value.real(), f.value.imag(),
                    std::abs(f.value - t.value));
    }
    return 0;
}

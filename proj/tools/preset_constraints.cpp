// Prints, for every catalog preset, the constraint targets measured from the
// literal initial profile against the stored (printed) targets. Used to
// freeze the catalog's `varied` flags and notes.

#include <cstdio>

#include "vesicle/vesicle.hpp"

int main() {
    using namespace vesicle;
    std::printf("%-16s %10s %10s %8s | %10s %10s %8s | %10s %10s %8s\n", "preset", "alpha*",
                "alpha", "dev%", "beta*", "beta", "dev%", "dA0*", "dA0", "dev%");
    for (const auto& name : preset_names()) {
        const ExperimentPreset& pr = preset(name);
        Field phi0 = tanh_ellipsoid(pr.init, pr.domain);
        Constraints c = derive_constraints(phi0, pr.params);
        auto dev = [](double measured, double stored) {
            return stored != 0 ? 100.0 * (measured - stored) / stored : 0.0;
        };
        const ModelParams& p = pr.params;
        std::printf("%-16s %10.4f %10.4f %8.2f | %10.4f %10.4f %8.2f | %10.4f %10.4f %8.2f\n",
                    pr.name.c_str(), c.alpha, p.alpha, dev(c.alpha, p.alpha), c.beta, p.beta,
                    dev(c.beta, p.beta), c.dA0, p.dA0, dev(c.dA0, p.dA0));
    }
    return 0;
}

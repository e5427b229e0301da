#pragma once

namespace wentzell {

/// Functional values recorded at one sample time.
struct FunctionalSample {
    double t = 0.0;
    double E_u = 0.0;
    double F = 0.0;
    double W = 0.0;
    double V = 0.0;
    double Gamma = 0.0;
    double sup_dev = 0.0;
};

}  // namespace wentzell

#pragma once

#include <vector>

#include "capflow/gfm.hpp"
#include "capflow/grid.hpp"

namespace capflow {

struct SolveStats {
    int iterations = 0;
    double residual = 0.0; // |r|_2 at exit
};

// Conjugate gradients with a zero-fill incomplete Cholesky preconditioner on
// the face graph. p is the warm start and the result. Converges when
// |r|_2 <= tol * max(|r0|_2, |rhs|_2); throws after 10n + 100 iterations.
// Singular (all-Neumann) systems are solved in the mean-free subspace and the
// result is returned mean-free. Deterministic and serial.
SolveStats solve_pressure(const Grid& g, const PressureAssembly& sys, std::vector<double>& p,
                          double tol = 1e-12);

} // namespace capflow

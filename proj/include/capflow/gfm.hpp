#pragma once

#include <utility>
#include <vector>

#include "capflow/curvature.hpp"
#include "capflow/fields.hpp"
#include "capflow/grid.hpp"

namespace capflow {

struct FluidPair {
    double rho_l = 1.0, rho_g = 1.0; // liquid = the alpha=1 phase
    double mu_l = 0.0, mu_g = 0.0;
    double sigma = 0.0;
    Vec2 gravity;
};

// Interior face whose cells sit on opposite sides of the 0.5 level.
struct InterfacialFace {
    int face = -1;
    double lambda = 0.0; // owner->crossing fraction of the cell segment
    Vec2 x_f;            // crossing position
};

std::vector<InterfacialFace> detect_interfacial_faces(const Grid& g, const ScalarField& alpha);

double relative_position(double alpha_owner, double alpha_neighbour);

// Pressure head difference carried across an interfacial face, seen from the
// owner: the wet side accumulates the density-jump gravity work plus the
// sigma_kappa term, a dry owner sees the negation.
double face_jump(bool owner_wet, double rho_l, double rho_g, Vec2 gravity, Vec2 x_f,
                 double sigma_kappa);

// Pressure-correction system in SPD form: diag p - sum a_face p_nb = rhs.
// a_face is the full conductance (1/a_P)_f * area/|d| * beta_f, with the
// sharp two-sided beta combination on interfacial faces and the mixture value
// elsewhere. jump holds the per-face head H (zero off the interface); open
// boundary faces carry a Dirichlet p=0 closure in a_face and diag.
struct PressureAssembly {
    std::vector<double> diag, rhs;
    FaceField a_face;
    FaceField jump;
    std::vector<char> interfacial;
    FaceField lambda_face;
    bool singular = false; // no open patch: solution fixed up to a constant
};

PressureAssembly assemble_pressure_system(const Grid& g, const ScalarField& alpha,
                                          const ScalarField& beta_cell,
                                          const ScalarField& inv_aP,
                                          const FaceField& phiHbyA,
                                          const CurvatureField& kappa,
                                          const FluidPair& fluids);

// phi = phiHbyA - a_face (p_N - p_O - H); open boundaries use the p=0 face
// value, walls and symmetry planes stay zero.
FaceField reconstruct_fluxes(const Grid& g, const PressureAssembly& sys,
                             const FaceField& phiHbyA, const std::vector<double>& p);

// Wall-layer interfacial faces of dynamic-contact wall patches: the head each
// face carried in the previous step's balance is converted to the curvature
// the cells must present, imposed on both cells. theta_frame diagnoses the
// implied contact slope via the ghost-height inversion.
struct DynamicContactFace {
    int face = -1;
    int cell_lo = -1, cell_hi = -1;
    double kappa = 0.0; // imposed (liquid-convex positive)
    double h_ghost = 0.0;
    double theta_frame = 0.0;
    Vec2 x_f;
};

struct DynamicContactResult {
    std::vector<ContactOverride> overrides;
    std::vector<DynamicContactFace> faces;
};

DynamicContactResult dynamic_contact_overrides(const Grid& g, const ScalarField& alpha,
                                               const NormalField& normals,
                                               const ScalarField& inv_aP,
                                               const FaceField& phiHbyA,
                                               const std::vector<double>& p_prev,
                                               const FluidPair& fluids);

} // namespace capflow

#pragma once
#include <string>
#include <vector>

#include "skyrm/noise.hpp"
#include "skyrm/qstate.hpp"

namespace skyrm {

// Two-port element: external phase phi on the upper input, then a symmetric
// coupler with internal angle theta,
//   T(theta, phi) = [ e^{i phi} cos(theta/2)    i sin(theta/2)   ]
//                   [ i e^{i phi} sin(theta/2)  cos(theta/2)     ],
// acting on ports (port, port+1). theta = 0 is the bar state.
struct MeshElement {
    int layer = 0;
    int port = 0;
    Real theta = 0;
    Real phi = 0;
};

struct MeshProgram {
    Index dim = 0;
    std::vector<MeshElement> elements;  // applied in list order
    RVec output_phases;                 // final per-port phases

    void validate() const;
};

// Completes k orthonormal columns to a D x D unitary; the inputs stay as the
// first k columns, the rest come from Gram-Schmidt over canonical basis
// vectors (deterministic).
CMat complete_isometry(const CMat& columns);

// Rectangular nearest-neighbor decomposition with D(D-1)/2 elements; the
// returned program reproduces U columnwise to ~1e-9.
MeshProgram mesh_decompose(const CMat& u);

CVec mesh_apply(const MeshProgram& program, const CVec& input);
CMat mesh_unitary(const MeshProgram& program);

enum class ScanSubspace { joint, local_a, local_b, nonlocal };

std::string to_string(ScanSubspace s);
ScanSubspace scan_subspace_from_string(const std::string& s);

// For each phi, synthesizes (|u1 u1> + e^{i phi}|u2 u2>)/sqrt(2) and reports
// the charge of the requested texture.
SweepResult phase_scan(const std::vector<CVec>& modes, Index m, const std::vector<Real>& phis,
                       ScanSubspace subspace, const ModeGrid& grid, int threads = 1);

}  // namespace skyrm

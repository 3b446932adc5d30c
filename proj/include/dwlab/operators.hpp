#pragma once

#include <functional>
#include <memory>

#include "dwlab/banded.hpp"
#include "dwlab/coefficients.hpp"
#include "dwlab/grid.hpp"

namespace dwlab {

enum class Symmetry { SelfadjointInMeasure, General };

// Discrete operator on one sector, banded in the node basis. Assembly is
// pure; instances are immutable after construction and safe to share.
struct SectorOperator {
  SectorGrid grid;
  BandedMatrix mat;
  Symmetry symmetry = Symmetry::General;

  std::vector<cxd> apply(const std::vector<cxd>& x) const {
    std::vector<cxd> y(x.size());
    mat.matvec(x.data(), y.data());
    return y;
  }
};

// Divergence-form radial operator div(geff grad) reduced to the sector:
//   (L u)_j = r_j^{1-d} [ geff_{j+1/2} r_{j+1/2}^{d-1} (u_{j+1}-u_j)
//                        - geff_{j-1/2} r_{j-1/2}^{d-1} (u_j-u_{j-1}) ] / h^2
//             - geff(r_j) ell(ell+d-2) u_j / r_j^2
// Boundary: ghost reflection at r=0 for ell=0, Dirichlet for ell>=1; Dirichlet
// at r_max. Symmetric in the measure inner product by construction.
SectorOperator assemble_divform(const std::function<double(double)>& geff,
                                const SectorGrid& grid);

// Delta_G for the profile's metric coefficient g
SectorOperator assemble_laplacian(const CoefficientProfile& profile,
                                  const SectorGrid& grid);

// free sector Laplacian Delta (geff = 1)
SectorOperator assemble_free_laplacian(const SectorGrid& grid);

// diagonal multiplication operator, exact on nodes
SectorOperator assemble_multiplier(const std::function<double(double)>& fn,
                                   const SectorGrid& grid);
SectorOperator assemble_multiplier_cx(const std::function<cxd(double)>& fn,
                                      const SectorGrid& grid);

// generator of dilations A = -i (d/2 + r d/dr), centered differences
SectorOperator assemble_dilation_generator(const SectorGrid& grid);

// weighted inner product / norm helpers on the grid
cxd inner(const SectorGrid& g, const std::vector<cxd>& u, const std::vector<cxd>& v);
double norm(const SectorGrid& g, const std::vector<cxd>& u);
double norm_ball(const SectorGrid& g, const std::vector<cxd>& u, double radius);
double norm_weighted(const SectorGrid& g, const std::vector<cxd>& u, double delta);

std::vector<cxd> to_cx(const std::vector<double>& x);

} // namespace dwlab

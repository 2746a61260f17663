#pragma once

#include "snrlab/grid.hpp"

namespace snrlab {

// The four half-resolution subbands of a single orthonormal Haar level.
struct SubbandSet {
    Grid ll, lh, hl, hh;
};

// Orthonormal Haar analysis, per channel. For each 2x2 block
// [[a,b],[c,d]]: ll=(a+b+c+d)/2, lh=(a+b-c-d)/2, hl=(a-b+c-d)/2, hh=(a-b-c+d)/2.
SubbandSet dwt_haar(const Grid& x);

// Exact inverse of dwt_haar.
Grid idwt_haar(const SubbandSet& s);

}  // namespace snrlab

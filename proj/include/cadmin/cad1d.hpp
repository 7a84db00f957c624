#pragma once

// The coarsest decomposition of the real line adapted to a set given by a
// formula in x1.

#include "cadmin/cadmodel.hpp"

namespace cadmin {

struct Cad1dResult {
    Cad cad;
    LeafLabeling labels;
    /// Section points in increasing order.
    std::vector<AlgebraicNumber> sections;
};

/// Sections are exactly the boundary points of the set, including isolated
/// points of the set and of its complement. Throws std::invalid_argument when
/// the formula uses other variables or non-polynomial atoms.
Cad1dResult minimum_cad_1d(const Formula& set);

}  // namespace cadmin

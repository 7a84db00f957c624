#pragma once

// Built-in example decompositions with their known properties.

#include "cadmin/poset.hpp"

namespace cadmin {

struct ExpectedFacts {
    std::size_t leaves = 0;
    /// Applicable tree rules (pivots as dot strings).
    std::vector<std::string> rules;
    /// The rules among them that lift.
    std::vector<std::string> lifted;
    std::optional<std::size_t> poset_nodes, poset_edges, minimal_count;
    std::optional<bool> has_minimum, confluent;
};

struct GalleryEntry {
    std::string name;
    std::string description;
    Cad cad;
    Formula set;
    LeafLabeling labels;
    ExpectedFacts expected;
};

std::vector<std::string> gallery_names();

/// Throws std::out_of_range for unknown names.
GalleryEntry gallery_entry(const std::string& name);

/// Compares the entry against its expected facts; returns the mismatches.
std::vector<std::string> check_expected(const GalleryEntry& e, const LiftConfig& cfg);

}  // namespace cadmin

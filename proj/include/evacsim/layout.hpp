#pragma once

#include <cstdint>

#include "evacsim/types.hpp"

namespace evacsim {

// Synthetic multi-deck ship layout: per deck two spinal corridors joined by
// cross-passages, cabins flanking them, one restaurant zone on the top deck,
// one lobby and a single exit on the lowest passenger deck, staircases
// linking adjacent decks, and seed-chosen shortcut passages topping the
// passageway count up to the target.
struct LayoutSpec {
    int decks = 3;
    int cabins_per_deck = 60;
    int stairs = 5;
    std::uint64_t seed = 0;
    int spine_length = 20;      // corridor nodes per side per deck
    int restaurant_nodes = 25;  // top-deck zone
    int lobby_nodes = 10;       // exit-deck zone
    // Total passageway segments; -1 scales with structure size (600 for the
    // default three-deck layout).
    int passageway_target = -1;
};

// Structural node count of the layout before cabins are added; total nodes
// = structural_node_count + decks * cabins_per_deck.
int structural_node_count(const LayoutSpec& spec);

// Cabin count per deck needed to hit target_nodes exactly; throws
// InfeasibleLayout when no integral solution exists.
int cabins_for_target_nodes(const LayoutSpec& spec, int target_nodes);

// Deterministic in spec (replay-equal). Throws InfeasibleLayout when the
// requested counts cannot be met.
EvacGraph generate_layout(const LayoutSpec& spec);

EvacGraph generate_layout(int decks, int cabins_per_deck, int stairs,
                          std::uint64_t seed);

}  // namespace evacsim

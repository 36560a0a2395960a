#pragma once

#include "uasn/orns.hpp"

#include <cstdint>
#include <string>

namespace uasn {

enum class BaselineKind { RA, LSRNP, NoRelay };

std::string to_string(BaselineKind k);
BaselineKind baseline_from_string(const std::string& s);

/// Anchor index (>= 1) of the upper neighbour farthest from c; lowest node id on ties.
int farthest_neighbor(const PlacementProblem& prob);

/// Line-segment placement: the relay may only sit between c and its farthest upper neighbour.
PlacementSolution solve_segment_placement(const PlacementProblem& prob, const Tolerances& tol = {});

SequentialPlacementResult place_lsrnp(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                      const OrnsOptions& options = {});

/// Random surface position, then a depth search maximising the smaller of the critical node's and
/// the relay's lifetimes. Deployed only when the critical node gains lifetime.
SequentialPlacementResult place_ra(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                   std::uint64_t seed, const OrnsOptions& options = {});

/// Identity: no relay is placed.
SequentialPlacementResult place_none(const Deployment& dep, const RateArray& rates, const EnergyModel& model);

}  // namespace uasn

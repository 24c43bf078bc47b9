#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "secidx/case_io.hpp"
#include "secidx/costly_cut.hpp"
#include "secidx/power_model.hpp"
#include "secidx/weights.hpp"

namespace secidx::test {

std::filesystem::path data_path(const std::string& name);

// Four buses, lines (1,2), (1,3), (2,4), unit reactance. Meters: injection
// at bus 1, both ends of line 1, from end of lines 2 and 3.
PowerNetwork four_bus_network();
MeasurementPlacement four_bus_placement(const PowerNetwork& net);

// The same five measurements in the order they are listed in the worked
// example: injection 1, flow 1->2, flow at bus 2 of line 1, flow 2->4,
// flow 1->3. Entry k is our global measurement index.
inline constexpr std::array<std::size_t, 5> kFourBusListedOrder{4, 0, 3, 2, 1};

// Indices of the worked example in listed order.
inline constexpr std::array<int, 5> kFourBusIndices{2, 3, 3, 1, 2};

// Hat matrix of the worked example (W = I), rows and columns in listed order.
Eigen::MatrixXd four_bus_hat_matrix();

// Four-node directed instance with node ids s = 0, 1, 2, t = 3.
CostlyCutInstance toy_cut_instance();

std::vector<char> membership(std::size_t n, std::initializer_list<NodeId> source_side);

std::vector<Clause> unsat_clauses();  // (1,2,3), (1,2,4), (1,3,4), (2,3,4)

}  // namespace secidx::test

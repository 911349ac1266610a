#pragma once

#include <string>
#include <vector>

#include "niche/particle_sim.hpp"
#include "niche/pde_solver.hpp"

namespace niche {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Write a file, creating parent directories. Throws std::runtime_error.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Histogram CSV, header "x,count,density" (1D) or "x,y,count,density" (2D),
/// one row per cell at its centre.
std::string histogram_csv(const HistogramEstimate& est);

/// Field CSV with the histogram layout; the count column is empty.
std::string field_csv(const GridField& field);
/// Same layout for the exterior band nodes.
std::string band_csv(const GridField& field);

/// Density table read back from either CSV layout.
struct DensityTable {
    HistogramGrid grid;
    std::vector<double> density;
};

DensityTable read_density_csv(const std::string& path);
DensityTable density_table(const HistogramEstimate& est);
DensityTable density_table(const GridField& field);

/// ∑ |a - b| * cell volume. Throws PreconditionError if the grids differ.
double l1_distance(const DensityTable& a, const DensityTable& b);

}  // namespace niche

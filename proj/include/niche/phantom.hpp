#pragma once

#include <cstdint>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/kernels.hpp"
#include "niche/particle_sim.hpp"
#include "niche/pde_solver.hpp"

namespace niche {

struct PhantomConfig {
    ProcessParams params{0.5, 0.5, 1e-3};
    Domain domain = Domain::interval(0.0, 1.0);
    GridSpec grid;
    double final_time = 0.1;
    std::vector<double> snapshot_times;  ///< final_time is always included
    InitialCondition initial;
};

struct PhantomSnapshot {
    std::int64_t step = 0;
    double time = 0.0;
    double mass = 0.0;
    GridField field;  ///< interior density plus the phantom band
};

/// Density-level counterpart of the particle process. Each step transports
/// the density on Ω^(λh) (nodes farther than λh from the boundary) by the
/// free-space step measure acting on the phantom-extended density, then
/// resets the collar Ω \ Ω^(λh) to ball averages over Ω ∩ B_λh (solved as a
/// fixed point, since collar averages involve collar values) and the
/// exterior band to the kernel-weighted extension.
class PhantomProcess {
public:
    explicit PhantomProcess(const PhantomConfig& config);

    const Lattice& lattice() const { return *lattice_; }
    GridField initial_field() const;
    /// One transport step followed by the collar and exterior resets.
    void step(GridField& field) const;
    /// Collar and exterior resets only.
    void reset(GridField& field) const;
    bool in_core(int node) const;

    std::vector<PhantomSnapshot> run() const;

private:
    PhantomConfig config_;
    std::shared_ptr<const Lattice> lattice_;
    std::shared_ptr<const NonlocalOperator> extension_;
    std::shared_ptr<const CellKernelTable> jump_;  // cell integrals of the jump kernel
    double jump_scale_ = 0.0;
    std::vector<double> walk_;      // walk weights by offset within walk_reach_
    int walk_reach_ = 0;
    std::vector<double> far_jump_;  // per interior slot
    std::vector<int> core_, collar_;
    std::vector<int> collar_slot_;  // node -> position in collar_, or -1
    std::vector<std::vector<std::pair<int, double>>> collar_to_core_;
    std::vector<double> lu_;        // factorized I - A_cc, row-major
    std::vector<int> pivot_;
};

std::vector<PhantomSnapshot> run_phantom_process(const PhantomConfig& config);

}  // namespace niche

//! Extended Kitaev chains: exact momentum-space solutions, winding numbers, Majorana zero
//! modes, diagonal entropy of pure states and blocks, global entanglement, and detection of
//! topological transitions from susceptibility discontinuities.

pub mod analysis;
pub mod entropy;
pub mod error;
pub mod gaussian;
pub mod majorana;
pub mod model;
pub mod oracle;
pub mod table;
pub mod topology;

pub use analysis::{
    comparative_scan, detect_critical_points, fit_block_law, fit_volume_law, susceptibility, uniform_grid, Channel,
    ComparativeTable, CriticalFlag, CriticalPointReport, FitKind, FlagCluster, ScalingFit, ScanRow, ScanSettings,
    SusceptibilityCurve,
};
pub use entropy::{
    block_de, block_diagonal_distribution, de_density_finite_size, global_entanglement, pure_state_de, Basis,
    DiagonalDistribution, EntropyReport,
};
pub use error::{Error, Result};
pub use gaussian::{
    kernel, open_chain_correlations, pfaffian, sigma_x_correlator, sigma_z_correlator, CorrelationSource,
    CorrelatorKernel,
};
pub use majorana::{build_coupling, mode_count, zero_modes, MajoranaCoupling, Side, ZeroMode, ZeroModePair};
pub use model::{
    dispersion, solve_chain, spin_couplings, Boundary, Decay, ModeData, ModelSpec, MomentumGrid, Param, SpinCouplings,
    Variant,
};
pub use topology::{phase_boundary_scan, trajectory, winding_number, Trajectory, WindingResult};

/// Crate version, echoed in output sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

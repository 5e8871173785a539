//! Desk-scale nonlinear pseudo-spectral solver in the moving frame.

pub mod fft;
pub mod field;
pub mod grid;
pub mod ledger;
pub mod nonlinear;
pub mod snapshot;
pub mod step;

pub use field::{init_field, InitialRecipe, SpectralField};
pub use grid::Grid;
pub use ledger::{
    bootstrap_monitor, ledger_update, sup_energy_component, EnergyLedger, LedgerRow,
    MonitorReport, SupDissipation, WeightSpec,
};
pub use nonlinear::{nonlinear_term, nonlinear_term_direct, Convolution, SpectralWorkspace};
pub use snapshot::{decode_snapshot, read_snapshot, write_snapshot};
pub use step::{StepInfo, Stepper};

//! Tunneling measurements on run artifacts and the verification drivers.

mod cavity;
mod crossings;
mod drivers;
mod sweep;

pub use cavity::{label_cavities, CavityMap};
pub use crossings::{detect_crossings, detect_crossings_with, occupancy, sample_weights, CrossingEvent, OccupancyStats, DEBOUNCE};
pub use drivers::{dispersion_modes, dispersion_test, impact_test, DispersionReport, ImpactReport, ModeResult};
pub use sweep::{sweep, SweepAxis, SweepRow, SweepTable, SPEED_WINDOW};

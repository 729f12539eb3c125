//! Simulators for the LOCAL, VOLUME and PROD-LOCAL models, random instance
//! generation, and solution verification.

pub mod gen;
pub mod grid;
pub mod ids;
pub mod io;
pub mod local;
pub mod ramsey;
pub mod verify;
pub mod volume;

pub use gen::{generate, GenSpec, InputDist, Topology};
pub use ids::{assign_ids, remap_ids_order_preserving};
pub use local::{run_local, run_local_with};
pub use verify::{verify_general, verify_nec, Violation, ViolationKind};

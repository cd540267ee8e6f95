//! Density-matrix simulator for heralded-absorption entanglement swapping.
//!
//! A photon entangled with spin 2 is recycled through a cavity holding a
//! second NV centre; absorption into the `A2` excited state, heralded by a
//! QND readout, swaps the entanglement onto the remote spins 1 and 3. The
//! joint state lives in a 32-dimensional space (see [`state`]) and is pushed
//! through the per-round channels of [`channels`] by [`engine`].

pub mod analytics;
pub mod bell;
pub mod channels;
pub mod engine;
pub mod error;
pub mod params;
pub mod relay;
pub mod schedule;
pub mod state;
pub mod sweep;
pub mod trajectory;

pub use bell::{epoch_target, BellLabel, FlipCount, FlipKind, PerTarget};
pub use engine::{
    final_parity_measurement, run_protocol, run_with_schedule, HeraldRecord, HeraldType, Parity,
    ProtocolResult,
};
pub use error::{Error, Result};
pub use params::{Approach, FlipObservable, ProtocolParams};
pub use schedule::build_schedule;
pub use state::{make_initial_state, pair13_fidelity, JointState, Level2p};

//! Weak-probe susceptibilities of a four-level `J=1/2 <-> J=1/2` atom whose
//! two Lambda subsystems share one pi-polarized control field.
//!
//! Three independent engines compute the same first-order response:
//! [`analytic`] (closed forms), [`bloch`] (Liouvillian null space and
//! sideband solve) and [`timedomain`] (RK4 integration plus demodulation).
//! [`spectra`] sweeps them and locates gain, transparency and dispersion
//! zeros; [`cli`] turns sweeps into CSV/JSON.

pub mod analytic;
pub mod cli;
pub mod bloch;
pub mod density;
pub mod error;
pub mod model;
pub mod spectra;
pub mod timedomain;

pub use error::{Error, Result};
pub use model::SystemParams;

pub mod curve;
pub mod error;
pub mod frames;
pub mod io;
pub mod monge;
pub mod numeric;
pub mod plane_family;
pub mod spine_synth;

pub use error::{Error, Result};

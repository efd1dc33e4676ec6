pub mod build;
pub mod cli;
pub mod combinat;
pub mod error;
pub mod exactalg;
pub mod opcalc;
pub mod scheme;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};

pub mod error;
pub mod fockspace;
pub mod interp;
pub mod models;
pub mod multiindex;
pub mod nilsim;
pub mod numerics;
pub mod poly;
pub mod polyideal;
pub mod repro;
pub mod spectral;
pub mod tuples;

pub use error::{Error, ErrorClass, Result};

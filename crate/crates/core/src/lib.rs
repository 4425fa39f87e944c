pub mod error;
pub mod gindex;
pub mod scalar;
pub mod smoothfn;
pub mod supernumber;
mod linalg;
pub mod superspace;
pub mod continuation;
pub mod superfield;
pub mod fixtures;
pub mod sampling;
pub mod characterize;
pub mod json;
pub mod suite;

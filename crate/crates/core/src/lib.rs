//! Exact and asymptotic distance statistics of random planar quadrangulations.

pub mod bijection;
pub mod continuum;
pub mod geodesic;
pub mod gf;
pub mod maps;
pub mod oracle;
pub mod sampler;
pub mod series;
pub mod verify;

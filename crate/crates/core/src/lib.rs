//! Exact Weil sums of binomials over small finite fields.

pub mod arith;
pub mod charsum;
pub mod cyclo;
pub mod ffield;
pub mod spectra;

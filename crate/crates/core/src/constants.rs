//! Physical constants (CODATA 2018, SI units).

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const C: f64 = 299_792_458.0;

pub const MICRO: f64 = 1e-6;
pub const MILLI: f64 = 1e-3;
pub const NANO: f64 = 1e-9;

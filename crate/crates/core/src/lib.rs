//! Poissonian shot noise, its Lévy-driven and Gaussian OU limits, and the
//! numerics to compare them.

pub mod distributions;
pub mod error;
pub mod levyou;
pub mod limits;
pub mod montecarlo;
pub mod quad;
pub mod real;
pub mod rng;
pub mod sampling;
pub mod shotnoise;
pub mod specfun;

pub use error::{Error, Result};
pub use real::Real;
pub use rng::RngStream;

pub type JumpFamily64 = distributions::JumpFamily<f64>;
pub type ShotNoiseParams64 = shotnoise::ShotNoiseParams<f64>;
pub type LevyOUParams64 = levyou::LevyOUParams<f64>;
pub type GaussianOUParams64 = levyou::GaussianOUParams<f64>;
pub type SubordinatorSpec64 = levyou::SubordinatorSpec<f64>;
pub type FamilySequence64 = limits::FamilySequence<f64>;

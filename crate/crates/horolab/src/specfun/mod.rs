//! Spectral engine: modified Bessel functions, Fourier transforms of
//! complementary-series basis vectors, Kirillov-model norms, and the direct
//! quadrature of the discrepancy operator's spectral norm.

pub mod bessel;
pub mod fresnel;
pub mod gamma;
pub mod kirillov;
pub mod oscillatory;

pub use bessel::bessel_k;
pub use kirillov::{basis_vector, hat_f0, hat_fn, kirillov_norm, KirillovFunction, SpectralParam};

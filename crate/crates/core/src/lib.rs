//! Spectral toolkit for semi-infinite Jacobi matrices in the limit circle
//! case (indeterminate Hamburger moment problem).
//!
//! The crate is organised bottom-up:
//!
//! - [`coefficients`]: coefficient models `a_n`, `b_n`, derived sequences
//!   `β_n, α_n, k_n, θ_n, φ_n`, and regime classification.
//! - [`polynomials`]: the solutions `p(z)`, `q(z)`, Wronskians and the
//!   scalar products with `p(0)`, `q(0)`.
//! - [`quasiresolvent`]: the Hilbert–Schmidt operator `𝓡(z)` that right
//!   inverts `J_max - z`.
//! - [`extensions`]: the Nevanlinna family `J_t`, `t ∈ ℝ ∪ {∞}`: resolvent
//!   coefficients `γ_t`, spectra, spectral measures and moments.
//! - [`jost`]: Jost solutions, the coefficients `σ±`, `τ±`, the boundary map
//!   `u ↦ (s₊, s₋)`, and the extensions `J_ω` with `s₊ = ω s₋`.
//! - [`cli`]: the command-line front end and the `verify` identity suite.
//!
//! ```
//! use lc_jacobi::prelude::*;
//!
//! let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
//! let gamma = gamma_t(&model, c64(0.0, 1.0), ExtensionParamT::Finite(0.0), 1e-10)?;
//! assert!(gamma.im > 0.0);
//! # Ok::<(), lc_jacobi::Error>(())
//! ```

pub mod cli;
pub mod coefficients;
pub mod error;
pub mod extensions;
pub mod io;
pub mod jost;
pub mod polynomials;
pub mod quasiresolvent;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for `Complex64::new(re, im)`.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub mod prelude {
    pub use crate::c64;
    pub use crate::coefficients::{classify, Classification, CoefficientModel, Diagonal, LcModel, OffDiagonal};
    pub use crate::extensions::{
        eigenvalues, gamma_t, moments, resolvent_apply, spectral_measure, ExtensionParamT, SpectralConfig,
        SpectralMeasure,
    };
    pub use crate::jost::{
        boundary_data, gamma_omega, green_pairing, jost_solutions, omega_eigenvalues, scattering_coeffs,
        BoundaryMap, ExtensionParamOmega, JostConfig,
    };
    pub use crate::polynomials::{eval_pq, inner_products, wronskian, InnerProducts, PolyTable};
    pub use crate::quasiresolvent::{gamma_coefficient, QuasiResolvent};
    pub use crate::series::Support;
    pub use crate::{Complex64, Error, Result};
}

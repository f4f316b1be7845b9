//! Numerical toolkit for the boundary behaviour of complete conformal metrics
//! `e^{2u} g_0` on Euclidean domains whose Ricci tensor satisfies the
//! `σ_k`-equation
//!
//! ```text
//! σ_k(λ(A(u))) = (n-1)^k C(n,k) e^{2ku},   u = +∞ on the boundary,
//! A(u) = (n-2)∇²u + Δu I + (n-2)(|∇u|² I - ∇u ⊗ ∇u).
//! ```
//!
//! The crate is `no_std` and only needs `alloc`. It is organised bottom-up:
//!
//! * [`symkit`]: elementary symmetric functions, Newton transformations,
//!   Gårding cone membership and a small dense symmetric eigensolver.
//! * [`phseries`]: truncated polyhomogeneous series in the distance `d`,
//!   with one `d^j log d` slot per order.
//! * [`geomodel`]: boundary curvature data and the closed-form `c₁`, `c₂`.
//! * [`expand`]: the order-by-order recursion for `c₁ … c_{n-1}, c_{n,1}` in
//!   umbilic (ball / half-space) models.
//! * [`radial`]: exact hyperbolic solutions, radial residuals, barriers and a
//!   shooting solver for finite boundary data.
//! * [`verify`]: expansion fitting, conformal invariance and decay checks.
#![no_std]
// `!(x > 0.0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod expand;
pub mod geomodel;
mod linalg;
pub mod phseries;
pub mod radial;
pub mod symkit;
pub mod verify;

pub use error::{Error, Result};
pub use geomodel::{BoundaryGeometry, ExpansionCoeffs};
pub use phseries::{PhSeries, PoleSeries};
pub use symkit::{Spectrum, SymMatrix};

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// Right-hand side constant `(n-1)^k C(n,k)`.
pub fn rhs_constant(n: usize, k: usize) -> f64 {
    libm::pow((n - 1) as f64, k as f64) * binomial(n, k)
}

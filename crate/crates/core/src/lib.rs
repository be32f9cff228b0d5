//! Numerical operator theory on analytic Jordan curves.
//!
//! The toolkit computes, at finite truncation order, the classical objects
//! attached to a univalent map of the disk: Faber polynomials and Grunsky
//! matrices, limiting Cauchy integrals over level curves with Plemelj-style
//! jump decomposition, Schiffer area-integral operators, boundary
//! transmission between the two complementary domains, and Dirichlet-energy
//! bookkeeping for boundary data on the circle.
//!
//! Every curve is presented through a conformal chart `phi` of the open unit
//! disk onto one side (the "declared" side) of the curve; the other side is
//! reached by analytic continuation of the chart across `|u| = 1`, which is
//! legitimate for the analytic curve catalog in [`maps`]. Level curves
//! `phi(|u| = r)` always carry the counterclockwise orientation of the
//! parameter circle, so all contour formulas are stated once, in chart
//! coordinates, for both bounded and unbounded declared sides.

pub mod cauchy;
pub mod error;
pub mod extrap;
pub mod faber;
pub mod fft;
pub mod linalg;
pub mod maps;
pub mod series;
pub mod transmit;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

//! The nome map q = exp(2 pi i tau) between the upper half-plane and the
//! punctured unit disk, its principal-branch inverse, and the neighbor points
//! that continue a disk point to the images of tau under S, ST, ST^-1.

use std::f64::consts::PI;

use crate::complex::{complex_exp, principal_log, Complex};
use crate::error::{Error, Result};
use crate::modular_group::{HalfPlanePoint, UnimodularMatrix};

/// A point q with 0 < |q| < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuncturedDiskPoint(Complex);

impl PuncturedDiskPoint {
    pub fn new(q: Complex) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Domain("disk point: non-finite".into()));
        }
        let r = q.abs();
        if r == 0.0 {
            return Err(Error::Domain("disk point: q = 0 is the puncture".into()));
        }
        if r >= 1.0 {
            return Err(Error::Domain(format!("disk point: |q| = {} >= 1", r)));
        }
        Ok(PuncturedDiskPoint(q))
    }

    pub fn value(&self) -> Complex {
        self.0
    }
}

/// q = exp(2 pi i tau). Fails with Range when Im tau is so large that |q|
/// underflows to zero.
pub fn q_from_tau(t: &HalfPlanePoint) -> Result<PuncturedDiskPoint> {
    let z = t.value();
    let q = complex_exp(Complex::new(-2.0 * PI * z.im, 2.0 * PI * z.re))?;
    if q.abs() == 0.0 {
        return Err(Error::Range(format!(
            "q underflowed at Im tau = {}",
            z.im
        )));
    }
    PuncturedDiskPoint::new(q)
}

/// tau = (log q) / (2 pi i) with the principal log, so Re tau lands in
/// (-1/2, 1/2] and Im tau = -ln|q| / (2 pi) > 0.
pub fn tau_from_q(q: &PuncturedDiskPoint) -> HalfPlanePoint {
    let l = principal_log(q.value()).expect("disk point is nonzero and finite");
    // division by 2 pi i swaps and scales the parts
    let tau = Complex::new(l.im / (2.0 * PI), -l.re / (2.0 * PI));
    HalfPlanePoint::new(tau).expect("Im tau = -ln|q|/(2 pi) > 0")
}

/// The matrix whose action the j-th neighbor point tracks: 1 -> S,
/// 2 -> ST, 3 -> ST^-1.
pub fn neighbor_matrix(j: usize) -> Result<UnimodularMatrix> {
    let s = UnimodularMatrix::s();
    let t = UnimodularMatrix::t();
    match j {
        1 => Ok(s),
        2 => Ok(s.mul(&t)),
        3 => Ok(s.mul(&t.inverse())),
        _ => Err(Error::Usage(format!("neighbor index {} not in 1..=3", j))),
    }
}

/// q_j = exp(4 pi^2 / (log q + c_j)) with c_1 = 0, c_2 = 2 pi i,
/// c_3 = -2 pi i: the nome of gamma_j tau computed without leaving the disk.
pub fn neighbor_q(q: &PuncturedDiskPoint, j: usize) -> Result<PuncturedDiskPoint> {
    let shift = match j {
        1 => 0.0,
        2 => 2.0 * PI,
        3 => -2.0 * PI,
        _ => return Err(Error::Usage(format!("neighbor index {} not in 1..=3", j))),
    };
    let l = principal_log(q.value())?;
    let den = Complex::new(l.re, l.im + shift);
    if den.abs() == 0.0 {
        return Err(Error::Domain("degenerate log in neighbor map".into()));
    }
    let exponent = Complex::from_real(4.0 * PI * PI) / den;
    let w = complex_exp(exponent)?;
    if w.abs() == 0.0 {
        return Err(Error::Range("neighbor point underflowed".into()));
    }
    // Re(4 pi^2 / den) < 0 because Re den = ln|q| < 0, so |w| < 1
    PuncturedDiskPoint::new(w)
}

/// Radius of the image of the half-plane region Im tau >= delta: exp(-2 pi delta).
pub fn strip_image_radius(delta: f64) -> f64 {
    (-2.0 * PI * delta).exp()
}

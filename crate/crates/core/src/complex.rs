//! Complex arithmetic with an explicit principal branch, plus the restricted
//! real elementary functions used by the structure evaluators.
//!
//! The principal logarithm keeps its imaginary part in (-pi, pi]. Restricted
//! functions are total: outside their interval they return exactly 0.0, and
//! the full-precision logarithm convention maps x <= 0 to 0.0 as well.

use std::f64::consts::{E, PI};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A complex number with f64 components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Principal argument in (-pi, pi]; a negative-zero imaginary part is
    /// treated as zero so negative reals land on +pi, not -pi.
    pub fn arg(self) -> f64 {
        let im = if self.im == 0.0 { 0.0 } else { self.im };
        im.atan2(self.re)
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Complex::new(self.re * s, self.im * s)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn inv(self) -> Self {
        let n = self.norm_sqr();
        Complex::new(self.re / n, -self.im / n)
    }

    pub fn powu(self, mut k: u32) -> Self {
        let mut base = self;
        let mut acc = Complex::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for Complex {
    type Output = Complex;
    fn div(self, rhs: Complex) -> Complex {
        let n = rhs.norm_sqr();
        Complex::new(
            (self.re * rhs.re + self.im * rhs.im) / n,
            (self.im * rhs.re - self.re * rhs.im) / n,
        )
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

/// exp(u + iv) = exp(u) (cos v + i sin v).
pub fn complex_exp(z: Complex) -> Result<Complex> {
    if !z.is_finite() {
        return Err(Error::Domain("complex_exp: non-finite input".into()));
    }
    let r = z.re.exp();
    if r.is_infinite() {
        return Err(Error::Range(format!(
            "complex_exp: exp({}) overflows f64",
            z.re
        )));
    }
    Ok(Complex::new(r * z.im.cos(), r * z.im.sin()))
}

/// Principal logarithm: log|z| + i arg(z), with arg in (-pi, pi].
pub fn principal_log(z: Complex) -> Result<Complex> {
    if !z.is_finite() {
        return Err(Error::Domain("principal_log: non-finite input".into()));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("principal_log: log of zero".into()));
    }
    let m = z.abs();
    if m.is_infinite() {
        return Err(Error::Range("principal_log: |z| overflows f64".into()));
    }
    Ok(Complex::new(m.ln(), z.arg()))
}

/// The restricted and full-precision real elementary functions interpreted by
/// the structure evaluators. Each restricted variant is zero outside its
/// interval; `LogFull` follows the convention log x = 0 for x <= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictedFnId {
    /// exp on [0, 1]
    ExpUnit,
    /// log on [1, 2]
    LogUnitTwo,
    /// sin on [-pi, pi]
    SinSym,
    /// cos on [-pi, pi]
    CosSym,
    /// arctan on [-1, 1]
    ArctanUnit,
    /// exp on all of R
    ExpFull,
    /// log on all of R, zero on x <= 0
    LogFull,
}

impl RestrictedFnId {
    /// Closed interval outside which the function is zero, if restricted.
    pub fn interval(self) -> Option<(f64, f64)> {
        match self {
            RestrictedFnId::ExpUnit => Some((0.0, 1.0)),
            RestrictedFnId::LogUnitTwo => Some((1.0, 2.0)),
            RestrictedFnId::SinSym | RestrictedFnId::CosSym => Some((-PI, PI)),
            RestrictedFnId::ArctanUnit => Some((-1.0, 1.0)),
            RestrictedFnId::ExpFull | RestrictedFnId::LogFull => None,
        }
    }
}

/// Total evaluation with zero-extension outside the domain predicate.
pub fn restricted_eval(f: RestrictedFnId, x: f64) -> f64 {
    if x.is_nan() {
        return 0.0;
    }
    if let Some((lo, hi)) = f.interval() {
        if x < lo || x > hi {
            return 0.0;
        }
    }
    match f {
        RestrictedFnId::ExpUnit | RestrictedFnId::ExpFull => x.exp(),
        RestrictedFnId::LogUnitTwo => x.ln(),
        RestrictedFnId::SinSym => x.sin(),
        RestrictedFnId::CosSym => x.cos(),
        RestrictedFnId::ArctanUnit => x.atan(),
        RestrictedFnId::LogFull => {
            if x <= 0.0 {
                0.0
            } else {
                x.ln()
            }
        }
    }
}

/// |arctan(1/x) - (sign(x) pi/2 - arctan x)| for x != 0.
pub fn arctan_reflection_residual(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("arctan reflection: non-finite input".into()));
    }
    if x == 0.0 {
        return Err(Error::Domain("arctan reflection: x = 0".into()));
    }
    let lhs = (1.0 / x).atan();
    let rhs = x.signum() * PI / 2.0 - x.atan();
    Ok((lhs - rhs).abs())
}

/// e, re-exported for tests of the exponential display.
pub const EULER: f64 = E;

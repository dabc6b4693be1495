//! The modular group SL(2, Z) acting on the upper half-plane: Moebius action,
//! fundamental-domain membership and reduction, and the three closed tiles
//! that together with the closed fundamental domain cover the strip
//! |Re tau| <= 1/2, Im tau >= 1/3.

use crate::complex::Complex;
use crate::error::{Error, Result};

/// Reduction loop cap. Each S step strictly increases Im, so hitting the cap
/// indicates a numerical pathology rather than a slow orbit.
pub const REDUCTION_CAP: usize = 10_000;

/// One-ulp guard for circle comparisons: boundary points such as the corner
/// (-1/2, sqrt(3)/2) do not square to exactly 1 in f64.
const CIRCLE_SLACK: f64 = 8.0 * f64::EPSILON;

/// Generator tokens. A word multiplies out left to right; the rightmost token
/// acts first on the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    S,
    T,
    TInv,
}

impl Generator {
    pub fn matrix(self) -> UnimodularMatrix {
        match self {
            Generator::S => UnimodularMatrix::s(),
            Generator::T => UnimodularMatrix::t(),
            Generator::TInv => UnimodularMatrix::t().inverse(),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Generator::S => "S",
            Generator::T => "T",
            Generator::TInv => "T^-1",
        }
    }
}

/// Integer matrix (a b; c d) with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a
            .checked_mul(d)
            .and_then(|ad| b.checked_mul(c).map(|bc| ad - bc))
            .ok_or_else(|| Error::Range("matrix entries overflow i64".into()))?;
        if det != 1 {
            return Err(Error::Usage(format!("determinant {} != 1", det)));
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub fn identity() -> Self {
        UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 }
    }

    /// S: z -> -1/z.
    pub fn s() -> Self {
        UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 }
    }

    /// T: z -> z + 1.
    pub fn t() -> Self {
        UnimodularMatrix { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn t_pow(n: i64) -> Self {
        UnimodularMatrix { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn a(&self) -> i64 { self.a }
    pub fn b(&self) -> i64 { self.b }
    pub fn c(&self) -> i64 { self.c }
    pub fn d(&self) -> i64 { self.d }

    pub fn mul(&self, rhs: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Inverse under det = 1: (d -b; -c a).
    pub fn inverse(&self) -> UnimodularMatrix {
        UnimodularMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> UnimodularMatrix {
        UnimodularMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Sign normal form: c > 0, or c = 0 and a > 0. -I and I act identically,
    /// so each action has exactly one normalized representative.
    pub fn normalized(&self) -> UnimodularMatrix {
        if self.c < 0 || (self.c == 0 && self.a < 0) {
            self.neg()
        } else {
            *self
        }
    }

    pub fn from_word(word: &[Generator]) -> UnimodularMatrix {
        word.iter()
            .fold(UnimodularMatrix::identity(), |m, g| m.mul(&g.matrix()))
    }

    /// c z + d at z.
    pub fn cocycle(&self, z: Complex) -> Complex {
        Complex::new(self.c as f64 * z.re + self.d as f64, self.c as f64 * z.im)
    }
}

/// A point of the open upper half-plane (Im > 0, finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint(Complex);

impl HalfPlanePoint {
    pub fn new(z: Complex) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::Domain("half-plane point: non-finite".into()));
        }
        if z.im <= 0.0 {
            return Err(Error::Domain(format!(
                "half-plane point: Im = {} is not positive",
                z.im
            )));
        }
        Ok(HalfPlanePoint(z))
    }

    pub fn value(&self) -> Complex {
        self.0
    }
}

/// (a z + b) / (c z + d). The image has Im = Im(z) / |c z + d|^2 > 0.
pub fn moebius_apply(g: &UnimodularMatrix, t: &HalfPlanePoint) -> HalfPlanePoint {
    let z = t.value();
    let num = Complex::new(g.a as f64 * z.re + g.b as f64, g.a as f64 * z.im);
    let den = g.cocycle(z);
    let w = num / den;
    debug_assert!(w.im > 0.0, "Moebius image left the half-plane: {:?}", w);
    HalfPlanePoint(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdVariant {
    /// |z| >= 1 and |Re z| <= 1/2.
    Closed,
    /// -1/2 <= Re z < 1/2, |z| >= 1, and on the unit circle only Re z <= 0:
    /// one representative per orbit.
    HalfOpen,
}

pub fn fd_membership(t: &HalfPlanePoint, variant: FdVariant) -> bool {
    let z = t.value();
    let n = z.norm_sqr();
    let on_or_outside = n >= 1.0 - CIRCLE_SLACK;
    match variant {
        FdVariant::Closed => on_or_outside && z.re.abs() <= 0.5,
        FdVariant::HalfOpen => {
            let on_circle = (n - 1.0).abs() <= CIRCLE_SLACK;
            on_or_outside && (-0.5..0.5).contains(&z.re) && !(on_circle && z.re > 0.0)
        }
    }
}

/// The three closed tiles adjacent to the fundamental domain from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tile {
    /// Image of the closed fundamental domain under S:
    /// |z| <= 1, |z - 1| >= 1, |z + 1| >= 1.
    S,
    /// Image under ST: Re z >= -1/2, |z + 1/3| >= 1/3, |z + 1| <= 1.
    St,
    /// Image under ST^-1: Re z <= 1/2, |z - 1/3| >= 1/3, |z - 1| <= 1.
    StInv,
}

impl Tile {
    pub fn matrix(self) -> UnimodularMatrix {
        match self {
            Tile::S => UnimodularMatrix::s(),
            Tile::St => UnimodularMatrix::s().mul(&UnimodularMatrix::t()),
            Tile::StInv => UnimodularMatrix::s().mul(&UnimodularMatrix::t().inverse()),
        }
    }
}

pub fn tile_membership(t: &HalfPlanePoint, tile: Tile) -> bool {
    let z = t.value();
    let dist_sq = |cx: f64, r: f64| {
        let dx = z.re - cx;
        (dx * dx + z.im * z.im, r * r)
    };
    match tile {
        Tile::S => {
            let inside_unit = z.norm_sqr() <= 1.0 + CIRCLE_SLACK;
            let (dp, rp) = dist_sq(1.0, 1.0);
            let (dm, rm) = dist_sq(-1.0, 1.0);
            inside_unit && dp >= rp - CIRCLE_SLACK && dm >= rm - CIRCLE_SLACK
        }
        Tile::St => {
            let (ds, rs) = dist_sq(-1.0 / 3.0, 1.0 / 3.0);
            let (db, rb) = dist_sq(-1.0, 1.0);
            z.re >= -0.5 && ds >= rs - CIRCLE_SLACK && db <= rb + CIRCLE_SLACK
        }
        Tile::StInv => {
            let (ds, rs) = dist_sq(1.0 / 3.0, 1.0 / 3.0);
            let (db, rb) = dist_sq(1.0, 1.0);
            z.re <= 0.5 && ds >= rs - CIRCLE_SLACK && db <= rb + CIRCLE_SLACK
        }
    }
}

/// Outcome of highest-point reduction: `gamma` carries the input to `reduced`,
/// and equals the product of `word` (leftmost token outermost).
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub gamma: UnimodularMatrix,
    pub reduced: HalfPlanePoint,
    pub word: Vec<Generator>,
}

/// Translate Re into [-1/2, 1/2), invert whenever |z| < 1, repeat. Terminates
/// because each inversion strictly increases Im.
pub fn reduce_to_fd(t: &HalfPlanePoint) -> Result<ReductionResult> {
    let mut z = t.value();
    let mut gamma = UnimodularMatrix::identity();
    // collected in application order, reversed at the end so the product
    // equals gamma
    let mut applied: Vec<Generator> = Vec::new();

    let mut done = false;
    for _ in 0..REDUCTION_CAP {
        let n = (z.re + 0.5).floor();
        if n != 0.0 {
            if n.abs() > 4.0e18 {
                return Err(Error::Range("reduction shift overflows i64".into()));
            }
            let ni = n as i64;
            z = Complex::new(z.re - n, z.im);
            gamma = UnimodularMatrix::t_pow(-ni).mul(&gamma);
            let tok = if ni > 0 { Generator::TInv } else { Generator::T };
            for _ in 0..ni.unsigned_abs() {
                applied.push(tok);
            }
        }
        if z.norm_sqr() < 1.0 {
            z = -z.inv();
            gamma = UnimodularMatrix::s().mul(&gamma);
            applied.push(Generator::S);
        } else {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::IterationCap(format!(
            "reduction did not settle within {} rounds",
            REDUCTION_CAP
        )));
    }

    applied.reverse();
    let mut word = applied;
    if gamma.c < 0 || (gamma.c == 0 && gamma.a < 0) {
        // flip sign to normal form; S S = -I keeps the word product equal to gamma
        gamma = gamma.neg();
        word.push(Generator::S);
        word.push(Generator::S);
    }
    debug_assert_eq!(UnimodularMatrix::from_word(&word), gamma);

    let reduced = HalfPlanePoint::new(z)?;
    Ok(ReductionResult { gamma, reduced, word })
}

/// Result of sampling the covering claim: every strip point with Im >= 1/3
/// should land in the closed fundamental domain or one of the three tiles.
#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub samples: usize,
    pub seed: u64,
    pub failures: Vec<Complex>,
}

pub fn covering_audit(samples: usize, seed: u64) -> CoveringReport {
    covering_audit_in_box(samples, seed, 1.0 / 3.0, 3.0)
}

/// Same sampler over |Re| <= 1/2 with Im in [im_min, im_max]. Boxes dipping
/// below 1/3 are expected to produce failures; that is the negative control.
pub fn covering_audit_in_box(
    samples: usize,
    seed: u64,
    im_min: f64,
    im_max: f64,
) -> CoveringReport {
    let mut rng = crate::sampling::rng(seed);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let z = crate::sampling::sample_box(&mut rng, (-0.5, 0.5), (im_min, im_max));
        let p = HalfPlanePoint::new(z).unwrap();
        let covered = fd_membership(&p, FdVariant::Closed)
            || tile_membership(&p, Tile::S)
            || tile_membership(&p, Tile::St)
            || tile_membership(&p, Tile::StInv);
        if !covered {
            failures.push(z);
        }
    }
    CoveringReport { samples, seed, failures }
}

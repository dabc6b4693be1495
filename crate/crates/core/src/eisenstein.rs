//! Eisenstein series E2, E4, E6: exact rational q-expansions, fast disk
//! evaluation with the truncation order chosen from |q|, slow lattice-sum
//! oracles, and the Ramanujan derivation on the polynomial ring in the three
//! generators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::modular_group::{moebius_apply, HalfPlanePoint, UnimodularMatrix};
use crate::q_transform::q_from_tau;

/// Default and minimum truncation order. |q| <= exp(-2 pi/3) over the reduced
/// region, so 64 terms leave a tail below 1e-50 there.
pub const MIN_ORDER: usize = 64;

/// Hard ceiling on the adaptive order; |q| close enough to 1 to exceed it is
/// reported as a precision failure rather than evaluated wrongly.
pub const MAX_ORDER: usize = 1 << 18;

fn check_weight(k: u32) -> Result<()> {
    if matches!(k, 2 | 4 | 6) {
        Ok(())
    } else {
        Err(Error::Usage(format!("weight {} is not one of 2, 4, 6", k)))
    }
}

/// zeta(2), zeta(4), zeta(6).
pub fn zeta_value(k: u32) -> Result<f64> {
    check_weight(k)?;
    Ok(match k {
        2 => PI * PI / 6.0,
        4 => PI.powi(4) / 90.0,
        _ => PI.powi(6) / 945.0,
    })
}

/// sigma_p(n) = sum of d^p over divisors d of n, for n = 0..=upto (entry 0
/// unused). u128 holds sigma_5 comfortably up to the order ceiling.
fn sigma_pow_table(p: u32, upto: usize) -> Vec<u128> {
    let mut table = vec![0u128; upto + 1];
    for d in 1..=upto {
        let dp = (d as u128).pow(p);
        let mut m = d;
        while m <= upto {
            table[m] += dp;
            m += d;
        }
    }
    table
}

/// A q-expansion with exact rational coefficients, indexed 0..=order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

impl QSeries {
    pub fn from_coefficients(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Usage("series needs at least the constant term".into()));
        }
        Ok(QSeries { coeffs })
    }

    pub fn constant(c: BigRational) -> Self {
        QSeries { coeffs: vec![c] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Truncate both operands to the shorter order; nothing is read past what
    /// either side actually stores.
    fn zip_len(&self, other: &QSeries) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let n = self.zip_len(other);
        QSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let n = self.zip_len(other);
        QSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.zip_len(other);
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }

    pub fn scale(&self, r: &BigRational) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// q d/dq: multiplies the n-th coefficient by n.
    pub fn theta(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * BigRational::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    pub fn truncated(&self, order: usize) -> QSeries {
        QSeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }
}

/// Exact q-expansion of E2, E4 or E6 through the given order:
/// 1 - 24 sum sigma_1 q^n, 1 + 240 sum sigma_3 q^n, 1 - 504 sum sigma_5 q^n.
pub fn eisenstein_qseries(k: u32, order: usize) -> Result<QSeries> {
    check_weight(k)?;
    if order > MAX_ORDER {
        return Err(Error::Range(format!(
            "order {} exceeds the ceiling {}",
            order, MAX_ORDER
        )));
    }
    let (p, scale) = match k {
        2 => (1, -24i64),
        4 => (3, 240),
        _ => (5, -504),
    };
    let sig = sigma_pow_table(p, order);
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(BigRational::one());
    for n in 1..=order {
        coeffs.push(BigRational::from_integer(
            BigInt::from(scale) * BigInt::from(sig[n]),
        ));
    }
    Ok(QSeries { coeffs })
}

/// Horner evaluation of an exact series at a point of the open unit disk.
pub fn eval_qseries(s: &QSeries, q: Complex) -> Result<Complex> {
    if !q.is_finite() || q.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "series evaluation needs |q| < 1, got |q| = {}",
            q.abs()
        )));
    }
    let mut acc = Complex::ZERO;
    for c in s.coeffs.iter().rev() {
        let cf = c.to_f64().ok_or_else(|| {
            Error::Precision("series coefficient does not fit in f64".into())
        })?;
        acc = acc * q + Complex::from_real(cf);
    }
    Ok(acc)
}

/// Smallest order (power-of-two growth from the 64 floor) whose geometric
/// tail at radius r is negligible. The coefficients obey |a_n| <= 525 n^5;
/// the (n+1)^7 margin and the (1-r)^6 factor cover the polynomial-weighted
/// tail sum.
pub fn needed_order(q_abs: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&q_abs) {
        return Err(Error::Domain(format!("|q| = {} outside [0, 1)", q_abs)));
    }
    if q_abs == 0.0 {
        return Ok(MIN_ORDER);
    }
    let ln_q = q_abs.ln();
    let target = 1e-20f64.ln() + 6.0 * (1.0 - q_abs).ln() - 2e3f64.ln();
    let mut n = MIN_ORDER;
    loop {
        let m = (n + 1) as f64;
        if 7.0 * m.ln() + m * ln_q <= target {
            return Ok(n);
        }
        n *= 2;
        if n > MAX_ORDER {
            return Err(Error::Precision(format!(
                "|q| = {} needs a series order beyond {}",
                q_abs, MAX_ORDER
            )));
        }
    }
}

struct Tables {
    e2: Vec<f64>,
    e4: Vec<f64>,
    e6: Vec<f64>,
}

fn build_tables(order: usize) -> Tables {
    let s1 = sigma_pow_table(1, order);
    let s3 = sigma_pow_table(3, order);
    let s5 = sigma_pow_table(5, order);
    let mut e2 = Vec::with_capacity(order + 1);
    let mut e4 = Vec::with_capacity(order + 1);
    let mut e6 = Vec::with_capacity(order + 1);
    e2.push(1.0);
    e4.push(1.0);
    e6.push(1.0);
    for n in 1..=order {
        e2.push(-24.0 * s1[n] as f64);
        e4.push(240.0 * s3[n] as f64);
        e6.push(-504.0 * s5[n] as f64);
    }
    Tables { e2, e4, e6 }
}

static TABLES: OnceLock<RwLock<Tables>> = OnceLock::new();

fn with_coefficients<T>(k: u32, order: usize, f: impl FnOnce(&[f64]) -> T) -> Result<T> {
    check_weight(k)?;
    let lock = TABLES.get_or_init(|| RwLock::new(build_tables(MIN_ORDER)));
    {
        let guard = lock.read().unwrap();
        if guard.e2.len() > order {
            let t = match k {
                2 => &guard.e2,
                4 => &guard.e4,
                _ => &guard.e6,
            };
            return Ok(f(&t[..=order]));
        }
    }
    let mut guard = lock.write().unwrap();
    if guard.e2.len() <= order {
        *guard = build_tables((order + 1).next_power_of_two());
    }
    let t = match k {
        2 => &guard.e2,
        4 => &guard.e4,
        _ => &guard.e6,
    };
    Ok(f(&t[..=order]))
}

fn horner(coeffs: &[f64], q: Complex) -> Complex {
    let mut acc = Complex::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * q + Complex::from_real(c);
    }
    acc
}

/// E_k at a disk point, with the truncation order picked from |q| and the
/// coefficient tables grown on demand.
pub fn eisenstein_value(k: u32, q: Complex) -> Result<Complex> {
    check_weight(k)?;
    if !q.is_finite() || q.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "Eisenstein evaluation needs |q| < 1, got |q| = {}",
            q.abs()
        )));
    }
    let order = needed_order(q.abs())?;
    with_coefficients(k, order, |c| horner(c, q))
}

/// Truncated double lattice sum (1/2 zeta(k)) sum over 0 < max(|m|,|n|) <= M
/// of (m tau + n)^-k. Polynomial tail; used only as a cross-method oracle.
pub fn eisenstein_lattice(k: u32, t: &HalfPlanePoint, cutoff: usize) -> Result<Complex> {
    if !(k == 4 || k == 6) {
        return Err(Error::Usage(format!(
            "lattice sum defined for weights 4 and 6, got {}",
            k
        )));
    }
    if cutoff == 0 {
        return Err(Error::Usage("lattice cutoff must be positive".into()));
    }
    let tau = t.value();
    let m_max = cutoff as i64;
    let mut sum = Complex::ZERO;
    for m in -m_max..=m_max {
        let mt = tau.scale(m as f64);
        for n in -m_max..=m_max {
            if m == 0 && n == 0 {
                continue;
            }
            let z = Complex::new(mt.re + n as f64, mt.im);
            sum = sum + z.powu(k).inv();
        }
    }
    Ok(sum.scale(0.5 / zeta_value(k)?))
}

/// Trigamma psi_1(z) = sum over j >= 0 of 1/(z+j)^2, by upward recurrence
/// into |z| >= 40 and then the asymptotic expansion
/// 1/z + 1/2z^2 + 1/6z^3 - 1/30z^5 + 1/42z^7 (next term is below 1e-16 there).
fn trigamma(mut z: Complex) -> Complex {
    let mut acc = Complex::ZERO;
    while z.abs() < 40.0 {
        acc = acc + (z * z).inv();
        z = z + Complex::ONE;
    }
    let w = z.inv();
    let w2 = w * w;
    let w3 = w2 * w;
    let w5 = w3 * w2;
    let w7 = w5 * w2;
    acc + w + w2.scale(0.5) + w3.scale(1.0 / 6.0) - w5.scale(1.0 / 30.0)
        + w7.scale(1.0 / 42.0)
}

/// G2(tau) = zeta(2) + sum_{m >= 1} sum_{n in Z} (m tau + n)^-2, inner sum
/// first. The inner series converges only conditionally as part of the
/// iterated order, so each inner sum runs to the cutoff and is completed by
/// its two trigamma tails before the outer sum is truncated; truncating both
/// sums at the same cutoff instead leaves an O(1) discrepancy (pi/(2 Im tau))
/// that no cutoff reduces.
pub fn g2_iterated(t: &HalfPlanePoint, cutoff: usize) -> Complex {
    let tau = t.value();
    let m_max = cutoff as i64;
    let np1 = (m_max + 1) as f64;
    let mut sum = Complex::from_real(PI * PI / 6.0);
    for m in 1..=m_max {
        let mt = tau.scale(m as f64);
        let mut inner = Complex::ZERO;
        for n in -m_max..=m_max {
            let z = Complex::new(mt.re + n as f64, mt.im);
            inner = inner + (z * z).inv();
        }
        // sum_{n > N} (m tau + n)^-2 = psi_1(m tau + N + 1), and the n < -N
        // half is psi_1(N + 1 - m tau)
        inner = inner
            + trigamma(Complex::new(mt.re + np1, mt.im))
            + trigamma(Complex::new(np1 - mt.re, -mt.im));
        sum = sum + inner;
    }
    sum
}

/// Polynomial in the commuting generators E2, E4, E6 with exact rational
/// coefficients; exponent triple (a, b, c) stands for E2^a E4^b E6^c.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EisensteinPolynomial {
    terms: BTreeMap<[u32; 3], BigRational>,
}

impl EisensteinPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::default();
        p.insert([0, 0, 0], c);
        p
    }

    pub fn generator(k: u32) -> Result<Self> {
        check_weight(k)?;
        let mut p = Self::default();
        let e = match k {
            2 => [1, 0, 0],
            4 => [0, 1, 0],
            _ => [0, 0, 1],
        };
        p.insert(e, BigRational::one());
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &BigRational)> {
        self.terms.iter()
    }

    fn insert(&mut self, e: [u32; 3], c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.insert([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            out.insert(*e, c * r);
        }
        out
    }

    /// Numeric value given the three generator values.
    pub fn eval(&self, e2: Complex, e4: Complex, e6: Complex) -> Result<Complex> {
        let mut acc = Complex::ZERO;
        for (e, c) in &self.terms {
            let cf = c.to_f64().ok_or_else(|| {
                Error::Precision("polynomial coefficient does not fit in f64".into())
            })?;
            acc = acc + (e2.powu(e[0]) * e4.powu(e[1]) * e6.powu(e[2])).scale(cf);
        }
        Ok(acc)
    }

    /// Expand into an exact q-series through the given order.
    pub fn to_qseries(&self, order: usize) -> Result<QSeries> {
        let gens = [
            eisenstein_qseries(2, order)?,
            eisenstein_qseries(4, order)?,
            eisenstein_qseries(6, order)?,
        ];
        let mut acc = QSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        };
        for (e, c) in &self.terms {
            let mut term = QSeries::constant(c.clone()).pad(order);
            for (g, reps) in gens.iter().zip(e.iter()) {
                for _ in 0..*reps {
                    term = term.mul(g);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl QSeries {
    fn pad(&self, order: usize) -> QSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigRational::zero());
        QSeries { coeffs }
    }
}

/// The derivation theta with theta E2 = (E2^2 - E4)/12,
/// theta E4 = (E2 E4 - E6)/3, theta E6 = (E2 E6 - E4^2)/2, extended by
/// linearity and the product rule. On q-expansions it realizes q d/dq.
pub fn theta_derive(p: &EisensteinPolynomial) -> EisensteinPolynomial {
    let mut out = EisensteinPolynomial::zero();
    for (e, c) in p.terms() {
        let [a, b, d] = *e;
        if a > 0 {
            let f = c * BigRational::new(BigInt::from(a), BigInt::from(12));
            out.insert([a + 1, b, d], f.clone());
            out.insert([a - 1, b + 1, d], -f);
        }
        if b > 0 {
            let f = c * BigRational::new(BigInt::from(b), BigInt::from(3));
            out.insert([a + 1, b, d], f.clone());
            out.insert([a, b - 1, d + 1], -f);
        }
        if d > 0 {
            let f = c * BigRational::new(BigInt::from(d), BigInt::from(2));
            out.insert([a + 1, b, d], f.clone());
            out.insert([a, b + 2, d - 1], -f);
        }
    }
    out
}

/// Coefficientwise residual of q dE_k/dq = (Ramanujan right side) through
/// order N - 1, in exact arithmetic. Expected identically zero.
pub fn q_side_derivative_residual(k: u32, order: usize) -> Result<BigRational> {
    check_weight(k)?;
    if order < 2 {
        return Err(Error::Usage("residual needs order >= 2".into()));
    }
    let e2 = eisenstein_qseries(2, order)?;
    let e4 = eisenstein_qseries(4, order)?;
    let e6 = eisenstein_qseries(6, order)?;
    let (lhs, rhs) = match k {
        2 => (
            e2.theta(),
            e2.mul(&e2)
                .sub(&e4)
                .scale(&BigRational::new(BigInt::one(), BigInt::from(12))),
        ),
        4 => (
            e4.theta(),
            e2.mul(&e4)
                .sub(&e6)
                .scale(&BigRational::new(BigInt::one(), BigInt::from(3))),
        ),
        _ => (
            e6.theta(),
            e2.mul(&e6)
                .sub(&e4.mul(&e4))
                .scale(&BigRational::new(BigInt::one(), BigInt::from(2))),
        ),
    };
    let mut worst = BigRational::zero();
    for n in 0..order {
        let d = (lhs.coefficient(n).unwrap() - rhs.coefficient(n).unwrap()).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// Deviation from the weight-k law at (g, tau): for k = 4, 6 the modular law
/// |E_k(g tau) - (c tau + d)^k E_k(tau)|; for k = 2 the quasimodular law of
/// G2 = zeta(2) E2, whose anomaly term is -pi i c (c tau + d). Values come
/// from the q-expansions.
pub fn weight_law_residual(k: u32, g: &UnimodularMatrix, t: &HalfPlanePoint) -> Result<f64> {
    check_weight(k)?;
    let image = moebius_apply(g, t);
    let q_here = q_from_tau(t)?.value();
    let q_there = q_from_tau(&image)?.value();
    let czd = g.cocycle(t.value());
    if k == 2 {
        let z2 = zeta_value(2)?;
        let lhs = eisenstein_value(2, q_there)?.scale(z2);
        let rhs = czd * czd * eisenstein_value(2, q_here)?.scale(z2)
            - Complex::new(0.0, PI * g.c() as f64) * czd;
        Ok((lhs - rhs).abs())
    } else {
        let lhs = eisenstein_value(k, q_there)?;
        let rhs = czd.powu(k) * eisenstein_value(k, q_here)?;
        Ok((lhs - rhs).abs())
    }
}

/// Interchange form for exact series: coefficients as rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub k: u32,
    pub order: usize,
    pub coefficients: Vec<String>,
}

impl SeriesDocument {
    pub fn from_series(k: u32, s: &QSeries) -> Self {
        SeriesDocument {
            k,
            order: s.order(),
            coefficients: s.coefficients().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn to_series(&self) -> Result<QSeries> {
        if self.coefficients.len() != self.order + 1 {
            return Err(Error::Parse(format!(
                "series document claims order {} but carries {} coefficients",
                self.order,
                self.coefficients.len()
            )));
        }
        let coeffs = self
            .coefficients
            .iter()
            .map(|s| {
                BigRational::from_str(s)
                    .map_err(|e| Error::Parse(format!("bad coefficient {:?}: {}", s, e)))
            })
            .collect::<Result<Vec<_>>>()?;
        QSeries::from_coefficients(coeffs)
    }
}

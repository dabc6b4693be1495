//! Truncated multivariate power series with exact rational coefficients:
//! ring arithmetic, inversion of units, Taylor recentring, and Weierstrass
//! division with respect to the last variable, computed by two independent
//! routes so the results can be cross-checked coefficientwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A power series in num_vars variables known through total degree
/// `truncation`: stored exponents never exceed the bound, absent terms are
/// zero, stored coefficients are nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPowerSeries {
    num_vars: usize,
    truncation: u32,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

fn degree_of(exponents: &[u32]) -> u32 {
    exponents.iter().sum()
}

impl MultiPowerSeries {
    pub fn zero(num_vars: usize, truncation: u32) -> Self {
        MultiPowerSeries {
            num_vars,
            truncation,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, truncation: u32, c: BigRational) -> Self {
        let mut s = Self::zero(num_vars, truncation);
        let _ = s.insert_term(&vec![0; num_vars], c);
        s
    }

    pub fn variable(num_vars: usize, truncation: u32, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::Usage(format!(
                "variable index {} out of range for {} variables",
                index, num_vars
            )));
        }
        let mut e = vec![0u32; num_vars];
        e[index] = 1;
        let mut s = Self::zero(num_vars, truncation);
        s.insert_term(&e, BigRational::one())?;
        Ok(s)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    /// Adds into the coefficient at `exponents`. Terms past the truncation
    /// bound vanish by the ring semantics; a wrong exponent count is an error.
    pub fn insert_term(&mut self, exponents: &[u32], coeff: BigRational) -> Result<()> {
        if exponents.len() != self.num_vars {
            return Err(Error::Usage(format!(
                "exponent tuple has {} entries, series has {} variables",
                exponents.len(),
                self.num_vars
            )));
        }
        if coeff.is_zero() || degree_of(exponents) > self.truncation {
            return Ok(());
        }
        let entry = self
            .terms
            .entry(exponents.to_vec())
            .or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(exponents);
        }
        Ok(())
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms
            .get(exponents)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn truncated(&self, bound: u32) -> Self {
        let mut out = Self::zero(self.num_vars, bound);
        for (e, c) in &self.terms {
            if degree_of(e) <= bound {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Ring arithmetic; the result carries the smaller of the two truncation
/// bounds, and multiplication drops products past it.
pub fn ps_arith(a: &MultiPowerSeries, b: &MultiPowerSeries, op: ArithOp) -> Result<MultiPowerSeries> {
    if a.num_vars != b.num_vars {
        return Err(Error::Usage(format!(
            "operands have {} and {} variables",
            a.num_vars, b.num_vars
        )));
    }
    let bound = a.truncation.min(b.truncation);
    let mut out = MultiPowerSeries::zero(a.num_vars, bound);
    match op {
        ArithOp::Add | ArithOp::Sub => {
            for (e, c) in &a.terms {
                out.insert_term(e, c.clone())?;
            }
            for (e, c) in &b.terms {
                let c = if op == ArithOp::Sub { -c.clone() } else { c.clone() };
                out.insert_term(e, c)?;
            }
        }
        ArithOp::Mul => {
            for (ea, ca) in &a.terms {
                if degree_of(ea) > bound {
                    continue;
                }
                for (eb, cb) in &b.terms {
                    if degree_of(ea) + degree_of(eb) > bound {
                        continue;
                    }
                    let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                    out.insert_term(&e, ca * cb)?;
                }
            }
        }
    }
    Ok(out)
}

/// Least exponent of the last variable in f(0, ..., 0, x), or None when that
/// restriction vanishes identically up to the stored truncation. With zero
/// variables the series is a constant and its own restriction.
pub fn order_in_last_variable(f: &MultiPowerSeries) -> Option<usize> {
    if f.num_vars == 0 {
        return if f.is_zero() { None } else { Some(0) };
    }
    let n = f.num_vars - 1;
    f.terms
        .keys()
        .filter(|e| e[..n].iter().all(|&x| x == 0))
        .map(|e| e[n] as usize)
        .min()
}

/// Multiplicative inverse through total degree `trunc`, by the graded
/// recurrence; needs a nonzero constant term.
pub fn ps_inverse(f: &MultiPowerSeries, trunc: u32) -> Result<MultiPowerSeries> {
    let zero_exp = vec![0u32; f.num_vars];
    let c0 = f.coefficient(&zero_exp);
    if c0.is_zero() {
        return Err(Error::Domain(
            "series has zero constant term, not a unit".into(),
        ));
    }
    let bound = trunc.min(f.truncation);
    let c0_inv = c0.recip();
    let mut out = MultiPowerSeries::zero(f.num_vars, bound);
    out.insert_term(&zero_exp, c0_inv.clone())?;
    for e in exponents_up_to(f.num_vars, bound) {
        if degree_of(&e) == 0 {
            continue;
        }
        let mut acc = BigRational::zero();
        for (fe, fc) in &f.terms {
            if degree_of(fe) == 0 || !fe.iter().zip(&e).all(|(a, b)| a <= b) {
                continue;
            }
            let rest: Vec<u32> = e.iter().zip(fe).map(|(a, b)| a - b).collect();
            let known = out.coefficient(&rest);
            if !known.is_zero() {
                acc += fc * known;
            }
        }
        if !acc.is_zero() {
            out.insert_term(&e, -(&c0_inv * acc))?;
        }
    }
    Ok(out)
}

fn exponents_up_to(num_vars: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut all = Vec::new();
    let mut current = vec![0u32; num_vars];
    fn walk(all: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, left: u32) {
        if pos == current.len() {
            all.push(current.clone());
            return;
        }
        for k in 0..=left {
            current[pos] = k;
            walk(all, current, pos + 1, left - k);
        }
        current[pos] = 0;
    }
    walk(&mut all, &mut current, 0, bound);
    all.sort_by_key(|e| degree_of(e));
    all
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Taylor recentring f(a + x) by exact binomial expansion of the stored
/// terms, truncated at the requested bound.
pub fn recenter(f: &MultiPowerSeries, a: &[BigRational], trunc: u32) -> Result<MultiPowerSeries> {
    if a.len() != f.num_vars {
        return Err(Error::Usage(format!(
            "centre has {} coordinates, series has {} variables",
            a.len(),
            f.num_vars
        )));
    }
    let bound = trunc.min(f.truncation);
    let mut out = MultiPowerSeries::zero(f.num_vars, bound);
    for (e, c) in &f.terms {
        // expand prod_i (x_i + a_i)^{e_i} one variable at a time
        let mut partial: Vec<(Vec<u32>, BigRational)> = vec![(Vec::new(), c.clone())];
        for (i, &ei) in e.iter().enumerate() {
            let mut next = Vec::new();
            let mut a_pow = vec![BigRational::one()];
            for _ in 0..ei {
                let last = a_pow.last().unwrap() * &a[i];
                a_pow.push(last);
            }
            for (pe, pc) in &partial {
                for k in 0..=ei {
                    let w = BigRational::from_integer(binomial(ei, k)) * &a_pow[(ei - k) as usize];
                    if w.is_zero() {
                        continue;
                    }
                    let mut ne = pe.clone();
                    ne.push(k);
                    next.push((ne, pc * w));
                }
            }
            partial = next;
        }
        for (pe, pc) in partial {
            out.insert_term(&pe, pc)?;
        }
    }
    Ok(out)
}

/// Output of Weierstrass division of g by f with respect to the last
/// variable: g = Q f + sum R_i x^i with deg_x R data of order d, exact
/// through the agreed truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionResult {
    pub quotient: MultiPowerSeries,
    pub remainders: Vec<MultiPowerSeries>,
    pub order: usize,
}

// The division works level by level, a level being the total degree in the
// first n variables. Each level is a map from a degree-s exponent in those
// variables to a polynomial in the last variable, capped at x-degree
// (D + 1) d: every step from level t to level s > t lowers x-degrees by at
// most d (one division by x^d, multipliers add at least zero), so under the
// cap each level-s quantity is exact through x-degree (D - s + 1) d, which
// covers the degree D - s needed of the quotient plus the shift at level s.

type XPoly = Vec<BigRational>;
type Level = BTreeMap<Vec<u32>, XPoly>;

fn xp_trim(p: &mut XPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn xp_add_into(acc: &mut XPoly, other: &XPoly, negate: bool) {
    if acc.len() < other.len() {
        acc.resize(other.len(), BigRational::zero());
    }
    for (j, c) in other.iter().enumerate() {
        if negate {
            acc[j] -= c;
        } else {
            acc[j] += c;
        }
    }
    xp_trim(acc);
}

fn xp_mul(a: &XPoly, b: &XPoly, cap: usize) -> XPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(cap + 1);
    let mut out = vec![BigRational::zero(); len];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() || i > cap {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if i + j > cap {
                break;
            }
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    xp_trim(&mut out);
    out
}

fn xp_inverse(a: &XPoly, cap: usize) -> XPoly {
    debug_assert!(!a.is_empty() && !a[0].is_zero());
    let c0_inv = a[0].recip();
    let mut out = vec![BigRational::zero(); cap + 1];
    out[0] = c0_inv.clone();
    for j in 1..=cap {
        let mut acc = BigRational::zero();
        for k in 1..=j.min(a.len() - 1) {
            if !a[k].is_zero() {
                acc += &a[k] * &out[j - k];
            }
        }
        out[j] = -(&c0_inv * acc);
    }
    xp_trim(&mut out);
    out
}

/// Splits into (degrees below d, degrees at least d shifted down by d).
fn xp_split(p: &XPoly, d: usize) -> (XPoly, XPoly) {
    let mut low: XPoly = p.iter().take(d).cloned().collect();
    let mut high: XPoly = p.iter().skip(d).cloned().collect();
    xp_trim(&mut low);
    xp_trim(&mut high);
    (low, high)
}

fn lv_add_into(acc: &mut Level, other: &Level, negate: bool) {
    for (e, p) in other {
        let slot = acc.entry(e.clone()).or_default();
        xp_add_into(slot, p, negate);
        if slot.is_empty() {
            acc.remove(e);
        }
    }
}

fn lv_mul(a: &Level, b: &Level, cap: usize) -> Level {
    let mut out = Level::new();
    for (ea, pa) in a {
        for (eb, pb) in b {
            let prod = xp_mul(pa, pb, cap);
            if prod.is_empty() {
                continue;
            }
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_default();
            xp_add_into(slot, &prod, false);
        }
    }
    out.retain(|_, p| !p.is_empty());
    out
}

fn lv_mul_xpoly(a: &Level, p: &XPoly, cap: usize) -> Level {
    let mut out = Level::new();
    for (e, q) in a {
        let prod = xp_mul(q, p, cap);
        if !prod.is_empty() {
            out.insert(e.clone(), prod);
        }
    }
    out
}

fn lv_neg(mut l: Level) -> Level {
    for p in l.values_mut() {
        for c in p.iter_mut() {
            *c = -c.clone();
        }
    }
    l
}

fn lv_split(l: &Level, d: usize) -> (Level, Level) {
    let mut low = Level::new();
    let mut high = Level::new();
    for (e, p) in l {
        let (lo, hi) = xp_split(p, d);
        if !lo.is_empty() {
            low.insert(e.clone(), lo);
        }
        if !hi.is_empty() {
            high.insert(e.clone(), hi);
        }
    }
    (low, high)
}

struct Prologue {
    n: usize,
    d: usize,
    bound: u32,
    x_cap: usize,
    f_levels: Vec<Level>,
    g_levels: Vec<Level>,
    a_unit: XPoly,
    a_inv: XPoly,
}

fn decompose(f: &MultiPowerSeries, n: usize, s_max: usize, x_cap: usize) -> Vec<Level> {
    let mut levels = vec![Level::new(); s_max + 1];
    for (e, c) in &f.terms {
        let xbar: Vec<u32> = e[..n].to_vec();
        let s = degree_of(&xbar) as usize;
        let j = e[n] as usize;
        if s > s_max || j > x_cap {
            continue;
        }
        let slot = levels[s].entry(xbar).or_default();
        if slot.len() <= j {
            slot.resize(j + 1, BigRational::zero());
        }
        slot[j] += c;
    }
    for level in &mut levels {
        for p in level.values_mut() {
            xp_trim(p);
        }
        level.retain(|_, p| !p.is_empty());
    }
    levels
}

fn division_prologue(
    f: &MultiPowerSeries,
    g: &MultiPowerSeries,
    trunc: u32,
) -> Result<Prologue> {
    if f.num_vars != g.num_vars {
        return Err(Error::Usage(format!(
            "divisor has {} variables, dividend has {}",
            f.num_vars, g.num_vars
        )));
    }
    if f.num_vars == 0 {
        return Err(Error::Usage(
            "division needs at least one variable".into(),
        ));
    }
    let d = order_in_last_variable(f).ok_or_else(|| {
        Error::Domain(
            "division impossible: divisor vanishes identically at x-bar = 0".into(),
        )
    })?;
    let n = f.num_vars - 1;
    let bound = f.truncation.min(g.truncation).min(trunc);
    let x_cap = if d == 0 {
        bound as usize
    } else {
        (bound as usize + 1) * d
    };
    let s_max = bound as usize;
    let f_levels = decompose(f, n, s_max, x_cap);
    let g_levels = decompose(g, n, s_max, x_cap);
    let zero_key = vec![0u32; n];
    let f0 = f_levels[0].get(&zero_key).cloned().unwrap_or_default();
    debug_assert!(f0.len() > d && f0[..d].iter().all(|c| c.is_zero()));
    let a_unit: XPoly = f0[d..].to_vec();
    let a_inv = xp_inverse(&a_unit, x_cap);
    Ok(Prologue {
        n,
        d,
        bound,
        x_cap,
        f_levels,
        g_levels,
        a_unit,
        a_inv,
    })
}

fn assemble(p: &Prologue, q_levels: Vec<Level>, r_levels: Vec<Level>) -> DivisionResult {
    let mut quotient = MultiPowerSeries::zero(p.n + 1, p.bound);
    for level in &q_levels {
        for (xbar, poly) in level {
            for (j, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut e = xbar.clone();
                e.push(j as u32);
                let _ = quotient.insert_term(&e, c.clone());
            }
        }
    }
    let mut remainders = vec![MultiPowerSeries::zero(p.n, p.bound); p.d];
    for level in &r_levels {
        for (xbar, poly) in level {
            for (i, c) in poly.iter().enumerate() {
                if !c.is_zero() {
                    let _ = remainders[i].insert_term(xbar, c.clone());
                }
            }
        }
    }
    DivisionResult {
        quotient,
        remainders,
        order: p.d,
    }
}

/// Weierstrass division of g by f with respect to the last variable, by the
/// constructive-proof route: factor f = U (x^d - B) level by level (unit U,
/// x-degree of B below d), divide g by the monic factor recursively, then
/// fold U^{-1} into the quotient. The result is exact through the smallest
/// of the operand truncations and the requested bound.
pub fn weierstrass_divide(
    f: &MultiPowerSeries,
    g: &MultiPowerSeries,
    trunc: u32,
) -> Result<DivisionResult> {
    let p = division_prologue(f, g, trunc)?;
    let s_max = p.bound as usize;
    let zero_key = vec![0u32; p.n];

    // preparation: level s of U x^d - a B = f + sum_{0<t<s} U_t B_{s-t}
    let mut u_levels = vec![Level::new(); s_max + 1];
    u_levels[0].insert(zero_key.clone(), p.a_unit.clone());
    let mut b_levels = vec![Level::new(); s_max + 1];
    for s in 1..=s_max {
        let mut e_s = p.f_levels[s].clone();
        for t in 1..s {
            lv_add_into(&mut e_s, &lv_mul(&u_levels[t], &b_levels[s - t], p.x_cap), false);
        }
        let h = lv_mul_xpoly(&e_s, &p.a_inv, p.x_cap);
        let (low, high) = lv_split(&h, p.d);
        b_levels[s] = lv_neg(low);
        u_levels[s] = lv_mul_xpoly(&high, &p.a_unit, p.x_cap);
    }

    // V = U^{-1} level by level
    let mut v_levels = vec![Level::new(); s_max + 1];
    let mut v0 = Level::new();
    v0.insert(zero_key, p.a_inv.clone());
    v_levels[0] = v0;
    for s in 1..=s_max {
        let mut acc = Level::new();
        for t in 1..=s {
            lv_add_into(&mut acc, &lv_mul(&u_levels[t], &v_levels[s - t], p.x_cap), false);
        }
        v_levels[s] = lv_neg(lv_mul_xpoly(&acc, &p.a_inv, p.x_cap));
    }

    // monic division: g = Q'' (x^d - B) + R
    let mut qq_levels: Vec<Level> = Vec::with_capacity(s_max + 1);
    let mut r_levels = vec![Level::new(); s_max + 1];
    for s in 0..=s_max {
        let mut acc = p.g_levels[s].clone();
        for t in 0..s {
            lv_add_into(&mut acc, &lv_mul(&qq_levels[t], &b_levels[s - t], p.x_cap), false);
        }
        let (low, high) = lv_split(&acc, p.d);
        r_levels[s] = low;
        qq_levels.push(high);
    }

    // Q = Q'' V
    let mut q_levels = vec![Level::new(); s_max + 1];
    for s in 0..=s_max {
        for t in 0..=s {
            lv_add_into(
                &mut q_levels[s],
                &lv_mul(&qq_levels[t], &v_levels[s - t], p.x_cap),
                false,
            );
        }
    }

    Ok(assemble(&p, q_levels, r_levels))
}

/// Reference route for the same division: solve the defining identity
/// g = Q f + sum R_i x^i directly, level by level, reading Q_s and the R
/// data off the split of g_s - sum_{t<s} Q_t f_{s-t}. Shares nothing with
/// the preparation route beyond the polynomial primitives; by uniqueness of
/// Weierstrass division the two must agree coefficientwise.
pub fn weierstrass_divide_reference(
    f: &MultiPowerSeries,
    g: &MultiPowerSeries,
    trunc: u32,
) -> Result<DivisionResult> {
    let p = division_prologue(f, g, trunc)?;
    let s_max = p.bound as usize;
    let mut q_levels: Vec<Level> = Vec::with_capacity(s_max + 1);
    let mut r_levels = vec![Level::new(); s_max + 1];
    for s in 0..=s_max {
        let mut z = p.g_levels[s].clone();
        for t in 0..s {
            lv_add_into(&mut z, &lv_mul(&q_levels[t], &p.f_levels[s - t], p.x_cap), true);
        }
        let (low, high) = lv_split(&z, p.d);
        r_levels[s] = low;
        q_levels.push(lv_mul_xpoly(&high, &p.a_inv, p.x_cap));
    }
    Ok(assemble(&p, q_levels, r_levels))
}

/// g - (Q f + sum R_i x^i), truncated at the result's agreed bound; exactly
/// zero when the division data is correct.
pub fn recomposition_residual(
    f: &MultiPowerSeries,
    g: &MultiPowerSeries,
    division: &DivisionResult,
) -> Result<MultiPowerSeries> {
    let mut acc = ps_arith(&division.quotient, f, ArithOp::Mul)?;
    for (i, r) in division.remainders.iter().enumerate() {
        let lifted = lift_with_last_power(r, i as u32, acc.truncation);
        acc = ps_arith(&acc, &lifted, ArithOp::Add)?;
    }
    ps_arith(&g.truncated(acc.truncation), &acc, ArithOp::Sub)
}

fn lift_with_last_power(r: &MultiPowerSeries, power: u32, bound: u32) -> MultiPowerSeries {
    let mut out = MultiPowerSeries::zero(r.num_vars + 1, bound);
    for (e, c) in &r.terms {
        let mut lifted = e.clone();
        lifted.push(power);
        let _ = out.insert_term(&lifted, c.clone());
    }
    out
}

/// Seeded random division instance: the divisor has a forced order in the
/// last variable, both operands carry small integer coefficients.
pub fn sample_division_instance(
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (MultiPowerSeries, MultiPowerSeries, u32) {
    use rand::Rng;
    let n = rng.gen_range(1..=3usize);
    let vars = n + 1;
    let d = rng.gen_range(0..=4u32);
    let trunc = rng.gen_range(d.max(2)..=8);
    let random_exponent = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u32> {
        loop {
            let e: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=trunc)).collect();
            if degree_of(&e) <= trunc {
                return e;
            }
        }
    };
    let mut f = MultiPowerSeries::zero(vars, trunc);
    for _ in 0..(3 * vars) {
        let e = random_exponent(rng);
        // keep the order in the last variable at exactly d
        if e[..n].iter().all(|&x| x == 0) && e[n] < d {
            continue;
        }
        let c = rng.gen_range(-5i64..=5);
        let _ = f.insert_term(&e, BigRational::from_integer(BigInt::from(c)));
    }
    let mut lead = vec![0u32; vars];
    lead[n] = d;
    if f.coefficient(&lead).is_zero() {
        let c = rng.gen_range(1i64..=5);
        let _ = f.insert_term(&lead, BigRational::from_integer(BigInt::from(c)));
    }
    let mut g = MultiPowerSeries::zero(vars, trunc);
    for _ in 0..(3 * vars) {
        let e = random_exponent(rng);
        let c = rng.gen_range(-5i64..=5);
        let _ = g.insert_term(&e, BigRational::from_integer(BigInt::from(c)));
    }
    (f, g, trunc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDocument {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

/// Interchange form: exponent tuples with rational coefficient strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MpsDocument {
    pub num_vars: usize,
    pub truncation: u32,
    pub terms: Vec<TermDocument>,
}

impl MpsDocument {
    pub fn from_series(s: &MultiPowerSeries) -> Self {
        MpsDocument {
            num_vars: s.num_vars,
            truncation: s.truncation,
            terms: s
                .terms
                .iter()
                .map(|(e, c)| TermDocument {
                    exponents: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<MultiPowerSeries> {
        use std::str::FromStr;
        let mut out = MultiPowerSeries::zero(self.num_vars, self.truncation);
        for term in &self.terms {
            if term.exponents.len() != self.num_vars {
                return Err(Error::Parse(format!(
                    "term {:?} has {} exponents, document declares {} variables",
                    term.exponents,
                    term.exponents.len(),
                    self.num_vars
                )));
            }
            if degree_of(&term.exponents) > self.truncation {
                return Err(Error::Parse(format!(
                    "term {:?} exceeds the declared truncation {}",
                    term.exponents, self.truncation
                )));
            }
            let c = BigRational::from_str(&term.coeff)
                .map_err(|e| Error::Parse(format!("bad coefficient {:?}: {}", term.coeff, e)))?;
            out.insert_term(&term.exponents, c)?;
        }
        Ok(out)
    }
}

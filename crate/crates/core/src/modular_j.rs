//! The modular function J realized as E4^3/(E4^3 - E6^2), its q-side
//! companion with the pole factored out, tau-derivatives through third order
//! via the closed derivation, and transformation-law residuals.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::{ToPrimitive, Zero};

use crate::complex::Complex;
use crate::eisenstein::{self, eisenstein_qseries, theta_derive, EisensteinPolynomial};
use crate::error::{Error, Result};
use crate::modular_group::{moebius_apply, HalfPlanePoint, UnimodularMatrix};
use crate::q_transform::{q_from_tau, PuncturedDiskPoint};

/// Below this |q| the denominator comes from the shifted series
/// U = (E4^3 - E6^2)/q, whose constant term 1728 keeps the small-q regime
/// away from catastrophic cancellation; above it the direct difference of
/// Eisenstein values is well conditioned.
const RATIO_SPLIT: f64 = 0.25;

/// Order of the exact U expansion; its tail at |q| = 0.25 is below 1e-60.
const U_ORDER: usize = 128;

/// A J sample tied to the point it was taken at. J(i) = 1 and J(rho) = 0 are
/// the normalization anchors of the construction.
#[derive(Debug, Clone, Copy)]
pub struct JValue {
    pub value: Complex,
    pub at: HalfPlanePoint,
}

/// rho = (-1 + i sqrt(3))/2, the corner of the fundamental domain where J
/// vanishes.
pub fn rho() -> HalfPlanePoint {
    HalfPlanePoint::new(Complex::new(-0.5, 3f64.sqrt() / 2.0)).unwrap()
}

struct JContext {
    u: Vec<f64>,
    /// m[k] realizes theta^k J times (E4^3 - E6^2): m[0] = E4^3 and
    /// m[k+1] = theta m[k] - E2 m[k], by the quotient rule with
    /// theta(E4^3 - E6^2) = E2 (E4^3 - E6^2).
    m: [EisensteinPolynomial; 4],
}

static CONTEXT: OnceLock<JContext> = OnceLock::new();

fn context() -> &'static JContext {
    CONTEXT.get_or_init(|| {
        let e4 = eisenstein_qseries(4, U_ORDER + 1).unwrap();
        let e6 = eisenstein_qseries(6, U_ORDER + 1).unwrap();
        let diff = e4.mul(&e4).mul(&e4).sub(&e6.mul(&e6));
        assert!(diff.coefficient(0).unwrap().is_zero());
        let u: Vec<f64> = (0..=U_ORDER)
            .map(|n| diff.coefficient(n + 1).unwrap().to_f64().unwrap())
            .collect();
        assert_eq!(u[0], 1728.0);

        let e2p = EisensteinPolynomial::generator(2).unwrap();
        let e4p = EisensteinPolynomial::generator(4).unwrap();
        let m0 = e4p.mul(&e4p).mul(&e4p);
        let m1 = theta_derive(&m0).sub(&e2p.mul(&m0));
        let m2 = theta_derive(&m1).sub(&e2p.mul(&m1));
        let m3 = theta_derive(&m2).sub(&e2p.mul(&m2));
        JContext {
            u,
            m: [m0, m1, m2, m3],
        }
    })
}

struct Parts {
    e2: Complex,
    e4: Complex,
    e6: Complex,
    /// U(q) when shifted, E4^3 - E6^2 otherwise.
    den: Complex,
    shifted: bool,
}

fn parts_at(q: Complex) -> Result<Parts> {
    let e2 = eisenstein::eisenstein_value(2, q)?;
    let e4 = eisenstein::eisenstein_value(4, q)?;
    let e6 = eisenstein::eisenstein_value(6, q)?;
    let (den, shifted) = if q.abs() < RATIO_SPLIT {
        let mut acc = Complex::ZERO;
        for &c in context().u.iter().rev() {
            acc = acc * q + Complex::from_real(c);
        }
        (acc, true)
    } else {
        (e4.powu(3) - e6 * e6, false)
    };
    Ok(Parts {
        e2,
        e4,
        e6,
        den,
        shifted,
    })
}

fn guarded_ratio(num: Complex, den: Complex) -> Result<Complex> {
    if den.abs() <= num.abs() * 1e-30 {
        return Err(Error::Precision(
            "denominator E4^3 - E6^2 vanishes to working precision".into(),
        ));
    }
    let v = num / den;
    if !v.is_finite() {
        return Err(Error::Range("J evaluation overflows".into()));
    }
    Ok(v)
}

fn pole_divide(value: Complex, q: Complex, times: usize) -> Result<Complex> {
    let mut v = value;
    for _ in 0..times {
        v = v / q;
        if !v.is_finite() {
            return Err(Error::Range("J evaluation overflows at the pole".into()));
        }
    }
    Ok(v)
}

/// J~ at a punctured-disk point. Near the pole the ratio E4^3/U is formed
/// first (the value of q J~, bounded there) and the 1/q factor is divided out
/// last, so heights beyond Im tau = 6 stay clear of overflow inside the
/// arithmetic.
pub fn jtilde_eval(q: &PuncturedDiskPoint) -> Result<Complex> {
    let z = q.value();
    let p = parts_at(z)?;
    let num = p.e4.powu(3);
    if p.shifted {
        let tamed = guarded_ratio(num, p.den)?;
        pole_divide(tamed, z, 1)
    } else {
        guarded_ratio(num, p.den)
    }
}

/// J at a half-plane point, through the nome.
pub fn j_eval(t: &HalfPlanePoint) -> Result<Complex> {
    jtilde_eval(&q_from_tau(t)?)
}

pub fn j_value(t: &HalfPlanePoint) -> Result<JValue> {
    Ok(JValue {
        value: j_eval(t)?,
        at: *t,
    })
}

/// d^order J / d tau^order for order in {1, 2, 3}: (2 pi i)^order theta^order J
/// with theta^order J evaluated as m[order]/(E4^3 - E6^2).
pub fn j_derivative(t: &HalfPlanePoint, order: usize) -> Result<Complex> {
    if !(1..=3).contains(&order) {
        return Err(Error::Usage(format!(
            "tau-derivative order must be 1, 2 or 3, got {}",
            order
        )));
    }
    let z = q_from_tau(t)?.value();
    let p = parts_at(z)?;
    let num = context().m[order].eval(p.e2, p.e4, p.e6)?;
    let theta_j = if p.shifted {
        pole_divide(guarded_ratio(num, p.den)?, z, 1)?
    } else {
        guarded_ratio(num, p.den)?
    };
    let two_pi_i = Complex::new(0.0, 2.0 * PI);
    let v = two_pi_i.powu(order as u32) * theta_j;
    if !v.is_finite() {
        return Err(Error::Range("derivative overflows".into()));
    }
    Ok(v)
}

/// d^order J~ / dq^order for order in {0, 1, 2}:
/// J~' = m[1]/(q D) and J~'' = (m[2] - m[1])/(q^2 D) with D = E4^3 - E6^2.
pub fn jtilde_derivative(q: &PuncturedDiskPoint, order: usize) -> Result<Complex> {
    let z = q.value();
    let (num, poles) = match order {
        0 => return jtilde_eval(q),
        1 => {
            let p = parts_at(z)?;
            (ratio_of(&context().m[1], &p)?, if p.shifted { 2 } else { 1 })
        }
        2 => {
            let p = parts_at(z)?;
            let m = context();
            let diff = m.m[2].sub(&m.m[1]);
            (ratio_of(&diff, &p)?, if p.shifted { 3 } else { 2 })
        }
        _ => {
            return Err(Error::Usage(format!(
                "q-derivative order must be 0, 1 or 2, got {}",
                order
            )))
        }
    };
    pole_divide(num, z, poles)
}

fn ratio_of(poly: &EisensteinPolynomial, p: &Parts) -> Result<Complex> {
    guarded_ratio(poly.eval(p.e2, p.e4, p.e6)?, p.den)
}

/// q^(order+1) J~^(order), the combination with the pole cleared: equal to
/// m[0]/U, m[1]/U, (m[2]-m[1])/U for orders 0, 1, 2, hence finite on the
/// whole open disk including q = 0 (values 1/1728, -1/1728, 1/864 there).
pub fn jtilde_tamed(q: Complex, order: usize) -> Result<Complex> {
    if !(0..=2).contains(&order) {
        return Err(Error::Usage(format!(
            "tamed order must be 0, 1 or 2, got {}",
            order
        )));
    }
    if !q.is_finite() || q.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "tamed evaluation needs |q| < 1, got |q| = {}",
            q.abs()
        )));
    }
    let p = parts_at(q)?;
    let ctx = context();
    let num = match order {
        0 => p.e4.powu(3),
        1 => ctx.m[1].eval(p.e2, p.e4, p.e6)?,
        _ => ctx.m[2].sub(&ctx.m[1]).eval(p.e2, p.e4, p.e6)?,
    };
    let base = guarded_ratio(num, p.den)?;
    if p.shifted {
        Ok(base)
    } else {
        Ok(base * q)
    }
}

/// Seeded (g, tau) pairs for invariance checks: word length <= max_len,
/// Im tau in [0.3, 2], cocycle modulus squared <= 30, |J(tau)| <= 1e3, and
/// Im (g tau) >= 0.08. The ceilings matter: J grows like exp(2 pi Im) of the
/// reduced point, and below image height ~0.05 the series sums behind the
/// Eisenstein values carry terms whose rounding noise alone exceeds a 1e-8
/// absolute tolerance.
pub fn sample_invariance_pair(
    rng: &mut rand_chacha::ChaCha8Rng,
    max_len: usize,
) -> (UnimodularMatrix, HalfPlanePoint) {
    loop {
        let (g, t) = crate::sampling::sample_law_pair(rng, max_len, (0.3, 2.0), 30.0);
        if moebius_apply(&g, &t).value().im < 0.08 {
            continue;
        }
        if let Ok(v) = j_eval(&t) {
            if v.abs() <= 1e3 {
                return (g, t);
            }
        }
    }
}

/// Seeded (g, tau) pairs for the derivative-law checks: word length <=
/// max_len, Im tau in [0.3, 1.2], cocycle modulus squared <= 10, and the
/// image-side derivatives |J'(g tau)|, |J''(g tau)| <= 2e4, for the same
/// reason as in sample_invariance_pair but with a 1e-6 tolerance budget.
pub fn sample_derivative_law_pair(
    rng: &mut rand_chacha::ChaCha8Rng,
    max_len: usize,
) -> (UnimodularMatrix, HalfPlanePoint) {
    loop {
        let (g, t) = crate::sampling::sample_law_pair(rng, max_len, (0.3, 1.2), 10.0);
        let image = moebius_apply(&g, &t);
        let first = match j_derivative(&image, 1) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let second = match j_derivative(&image, 2) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if first.abs() <= 2e4 && second.abs() <= 2e4 {
            return (g, t);
        }
    }
}

/// Absolute deviation of the transformation law at (g, tau):
/// order 0: J(g tau) = J(tau);
/// order 1: J'(g tau) = (c tau + d)^2 J'(tau);
/// order 2: J''(g tau) = (c tau + d)^4 J''(tau) + 2c (c tau + d)^3 J'(tau).
/// The cross term carries the factor c (differentiate the order-1 law once
/// more); for translations it drops and both laws are plain periodicity.
pub fn j_transformation_residual(
    g: &UnimodularMatrix,
    t: &HalfPlanePoint,
    order: usize,
) -> Result<f64> {
    let image = moebius_apply(g, t);
    match order {
        0 => Ok((j_eval(&image)? - j_eval(t)?).abs()),
        1 => {
            let czd = g.cocycle(t.value());
            Ok((j_derivative(&image, 1)? - czd.powu(2) * j_derivative(t, 1)?).abs())
        }
        2 => {
            let czd = g.cocycle(t.value());
            let rhs = czd.powu(4) * j_derivative(t, 2)?
                + czd.powu(3).scale(2.0 * g.c() as f64) * j_derivative(t, 1)?;
            Ok((j_derivative(&image, 2)? - rhs).abs())
        }
        _ => Err(Error::Usage(format!(
            "transformation law order must be 0, 1 or 2, got {}",
            order
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn hp(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(Complex::new(re, im)).unwrap()
    }

    fn disk(re: f64, im: f64) -> PuncturedDiskPoint {
        PuncturedDiskPoint::new(Complex::new(re, im)).unwrap()
    }

    #[test]
    fn anchors_at_the_elliptic_points() {
        let vi = j_eval(&hp(0.0, 1.0)).unwrap();
        assert!((vi - Complex::ONE).abs() <= 1e-9, "J(i) = {:?}", vi);
        let vr = j_eval(&rho()).unwrap();
        assert!(vr.abs() <= 1e-9, "J(rho) = {:?}", vr);
    }

    #[test]
    fn classical_values_at_cm_points() {
        // j(2i) = 66^3 and j(i sqrt 2) = 20^3, so after the 1728
        // normalization J(2i) = 287496/1728 and J(i sqrt 2) = 8000/1728
        let v = j_eval(&hp(0.0, 2.0)).unwrap();
        assert!((v - Complex::from_real(287496.0 / 1728.0)).abs() <= 1e-9);
        let w = j_eval(&hp(0.0, 2f64.sqrt())).unwrap();
        assert!((w - Complex::from_real(8000.0 / 1728.0)).abs() <= 1e-9);
    }

    #[test]
    fn invariance_under_short_words() {
        let mut rng = sampling::rng(41);
        let base = hp(0.1, 1.3);
        let reference = j_eval(&base).unwrap();
        for _ in 0..50 {
            let (g, _) = sampling::sample_word(&mut rng, 6);
            let moved = moebius_apply(&g, &base);
            let v = j_eval(&moved).unwrap();
            assert!(
                (v - reference).abs() <= 1e-8,
                "word moved value to {:?}",
                v
            );
        }
    }

    #[test]
    fn invariance_residual_on_seeded_pairs() {
        let mut rng = sampling::rng(42);
        for _ in 0..500 {
            let (g, t) = sample_invariance_pair(&mut rng, 6);
            let r = j_transformation_residual(&g, &t, 0).unwrap();
            assert!(r <= 1e-8, "residual {} at {:?}", r, t.value());
        }
    }

    #[test]
    fn nome_side_normalization() {
        let q = q_from_tau(&hp(0.0, 1.0)).unwrap();
        let v = jtilde_eval(&q).unwrap();
        assert!((v - Complex::ONE).abs() <= 1e-9);
    }

    #[test]
    fn pole_residue_and_cauchy_tail() {
        let c = |q: f64| {
            let v = jtilde_eval(&disk(q, 0.0)).unwrap();
            v.scale(q)
        };
        // the constant is read off the computed limit, then checked
        let limit = c(1e-7);
        assert!(limit.im.abs() <= 1e-18);
        let constant = 1.0 / limit.re;
        assert!((constant - 1728.0).abs() <= 0.2, "constant = {}", constant);
        assert!((c(1e-6).scale(1728.0) - Complex::ONE).abs() <= 1e-3);
        // Cauchy behavior along the positive reals: decade differences
        // shrink, and past 1e-6 they sit below 1e-6
        let d1 = (c(1e-5) - c(1e-6)).abs();
        let d2 = (c(1e-6) - c(1e-7)).abs();
        let d3 = (c(1e-7) - c(1e-8)).abs();
        assert!(d2 < d1 && d3 < d2);
        assert!(d2 <= 1e-6);
    }

    #[test]
    fn conjugate_inputs_give_conjugate_outputs() {
        let mut rng = sampling::rng(43);
        for _ in 0..100 {
            let q = sampling::sample_annulus(&mut rng, 1e-4, 0.7);
            let a = jtilde_eval(&PuncturedDiskPoint::new(q).unwrap()).unwrap();
            let b = jtilde_eval(&PuncturedDiskPoint::new(q.conj()).unwrap()).unwrap();
            assert!((a.conj() - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn conjugation_symmetry_on_the_half_plane() {
        let mut rng = sampling::rng(44);
        for _ in 0..100 {
            let z = sampling::sample_box(&mut rng, (-0.5, 0.5), (0.4, 2.5));
            let t = HalfPlanePoint::new(z).unwrap();
            let mirrored = HalfPlanePoint::new(Complex::new(-z.re, z.im)).unwrap();
            let a = j_eval(&t).unwrap();
            let b = j_eval(&mirrored).unwrap();
            assert!((a.conj() - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn first_derivative_vanishes_at_the_elliptic_points() {
        // theta J = -E4^2 E6 / (E4^3 - E6^2): E6(i) = 0 and E4(rho) = 0
        assert!(j_derivative(&hp(0.0, 1.0), 1).unwrap().abs() <= 1e-8);
        assert!(j_derivative(&rho(), 1).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn derivatives_match_central_finite_differences() {
        let mut rng = sampling::rng(45);
        let h = 1e-5;
        let eval_order = |t: &HalfPlanePoint, k: usize| -> Complex {
            if k == 0 {
                j_eval(t).unwrap()
            } else {
                j_derivative(t, k).unwrap()
            }
        };
        for _ in 0..100 {
            let z = sampling::sample_box(&mut rng, (-0.5, 0.5), (0.5, 2.0));
            for k in 1..=3usize {
                let up = hp(z.re + h, z.im);
                let dn = hp(z.re - h, z.im);
                let fd = (eval_order(&up, k - 1) - eval_order(&dn, k - 1)).scale(0.5 / h);
                let exact = eval_order(&hp(z.re, z.im), k);
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs(),
                    "k = {} at {:?}: fd {:?} vs {:?}",
                    k,
                    z,
                    fd,
                    exact
                );
            }
        }
    }

    #[test]
    fn transformation_law_examples() {
        let s = UnimodularMatrix::s();
        let t = UnimodularMatrix::t();
        let two_i = hp(0.0, 2.0);
        assert!(j_transformation_residual(&s, &two_i, 0).unwrap() <= 1e-8);
        assert!(j_transformation_residual(&s, &two_i, 1).unwrap() <= 1e-6);
        // c = 0: both derivative laws collapse to periodicity
        assert!(j_transformation_residual(&t, &hp(0.37, 0.9), 2).unwrap() <= 1e-10);
    }

    #[test]
    fn transformation_laws_on_seeded_pairs() {
        let mut rng = sampling::rng(46);
        for _ in 0..200 {
            let (g, t) = sample_derivative_law_pair(&mut rng, 6);
            for order in [1usize, 2] {
                let r = j_transformation_residual(&g, &t, order).unwrap();
                assert!(
                    r <= 1e-6,
                    "order {} residual {} at {:?} under {:?}",
                    order,
                    r,
                    t.value(),
                    g
                );
            }
        }
    }

    #[test]
    fn high_point_evaluation_factors_the_pole() {
        let t = hp(0.0, 6.5);
        let q = q_from_tau(&t).unwrap();
        let v = j_eval(&t).unwrap();
        assert!(v.is_finite());
        let tamed = jtilde_tamed(q.value(), 0).unwrap();
        let recombined = tamed / q.value();
        assert_eq!(v, recombined);
        assert!((v * q.value().scale(1728.0) - Complex::ONE).abs() <= 1e-10);
    }

    #[test]
    fn tamed_values_on_the_full_disk() {
        let expect = [1.0 / 1728.0, -1.0 / 1728.0, 1.0 / 864.0];
        for (k, e) in expect.iter().enumerate() {
            let at_zero = jtilde_tamed(Complex::ZERO, k).unwrap();
            assert!((at_zero - Complex::from_real(*e)).abs() <= 1e-15, "k = {}", k);
            let near_zero = jtilde_tamed(Complex::new(1e-9, 0.0), k).unwrap();
            assert!((near_zero - at_zero).abs() <= 1e-6);
        }
    }

    #[test]
    fn tamed_matches_scaled_derivatives() {
        let mut rng = sampling::rng(47);
        for _ in 0..60 {
            let q = sampling::sample_annulus(&mut rng, 1e-2, 0.6);
            let pt = PuncturedDiskPoint::new(q).unwrap();
            for k in 0..=2usize {
                let tamed = jtilde_tamed(q, k).unwrap();
                let scaled = jtilde_derivative(&pt, k).unwrap() * q.powu(k as u32 + 1);
                assert!(
                    (tamed - scaled).abs() <= 1e-10 * (1.0 + tamed.abs()),
                    "k = {} at {:?}",
                    k,
                    q
                );
            }
        }
    }

    #[test]
    fn order_validation() {
        let t = hp(0.0, 1.0);
        assert!(matches!(j_derivative(&t, 0), Err(Error::Usage(_))));
        assert!(matches!(j_derivative(&t, 4), Err(Error::Usage(_))));
        assert!(matches!(
            j_transformation_residual(&UnimodularMatrix::s(), &t, 3),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            jtilde_tamed(Complex::ZERO, 3),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            jtilde_tamed(Complex::from_real(1.0), 0),
            Err(Error::Domain(_))
        ));
        let q = disk(0.1, 0.0);
        assert!(matches!(jtilde_derivative(&q, 3), Err(Error::Usage(_))));
    }

    #[test]
    fn overflow_past_the_representable_pole_is_a_range_error() {
        let q = disk(1e-312, 0.0);
        assert!(matches!(jtilde_eval(&q), Err(Error::Range(_))));
    }

    #[test]
    fn j_value_carries_its_point() {
        let t = hp(0.0, 2.0);
        let jv = j_value(&t).unwrap();
        assert_eq!(jv.at.value(), t.value());
        assert!((jv.value - Complex::from_real(287496.0 / 1728.0)).abs() <= 1e-9);
    }
}

//! Seeded sampling helpers shared by the audit suites and the test harness.
//!
//! Everything here is deterministic for a fixed seed; audits rely on that to
//! produce byte-identical reports.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::Complex;
use crate::modular_group::{Generator, HalfPlanePoint, UnimodularMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform angle, log-uniform radius in [r_min, r_max].
pub fn sample_annulus(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Complex {
    let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let r = 10f64.powf(rng.gen_range(r_min.log10()..=r_max.log10()));
    Complex::new(r * theta.cos(), r * theta.sin())
}

pub fn sample_box(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> Complex {
    Complex::new(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

/// Upper half-plane point in the standard strip, Im between `im_min` and `im_max`.
pub fn sample_strip(rng: &mut ChaCha8Rng, im_min: f64, im_max: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(sample_box(rng, (-0.5, 0.5), (im_min, im_max))).unwrap()
}

/// Point of the closed fundamental domain with Im <= im_max, by rejection.
pub fn sample_fundamental_domain(rng: &mut ChaCha8Rng, im_max: f64) -> HalfPlanePoint {
    loop {
        let z = sample_box(rng, (-0.5, 0.5), (0.8, im_max));
        if z.norm_sqr() >= 1.0 {
            return HalfPlanePoint::new(z).unwrap();
        }
    }
}

/// Random word over {S, T, T^-1} of length <= max_len, avoiding immediate
/// cancellations, together with its matrix product.
pub fn sample_word(rng: &mut ChaCha8Rng, max_len: usize) -> (UnimodularMatrix, Vec<Generator>) {
    let len = rng.gen_range(0..=max_len);
    let mut word = Vec::with_capacity(len);
    let mut gamma = UnimodularMatrix::identity();
    for _ in 0..len {
        let g = loop {
            let g = match rng.gen_range(0..3) {
                0 => Generator::S,
                1 => Generator::T,
                _ => Generator::TInv,
            };
            match (word.last(), g) {
                (Some(Generator::S), Generator::S) => continue,
                (Some(Generator::T), Generator::TInv) => continue,
                (Some(Generator::TInv), Generator::T) => continue,
                _ => break g,
            }
        };
        word.push(g);
        gamma = gamma.mul(&g.matrix());
    }
    (gamma, word)
}

/// Seeded (gamma, tau) pair for transformation-law audits. Word length is
/// capped, tau comes from the standard strip, and pairs with
/// |c tau + d|^2 > czd_sq_cap are rejected: the laws compare quantities scaled
/// by powers of (c tau + d), and the absolute tolerances only make sense while
/// both sides stay within f64 cancellation reach.
pub fn sample_law_pair(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    im_range: (f64, f64),
    czd_sq_cap: f64,
) -> (UnimodularMatrix, HalfPlanePoint) {
    loop {
        let (gamma, _) = sample_word(rng, max_len);
        let tau = sample_strip(rng, im_range.0, im_range.1);
        let (c, d) = (gamma.c() as f64, gamma.d() as f64);
        let czd = Complex::new(c * tau.value().re + d, c * tau.value().im);
        if czd.norm_sqr() <= czd_sq_cap {
            return (gamma, tau);
        }
    }
}

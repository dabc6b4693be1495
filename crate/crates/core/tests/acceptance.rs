//! One test per acceptance criterion; each prints a PASS line with the
//! measured quantity next to its pinned tolerance.

use std::time::{Duration, Instant};

use modulus_core::complex::RestrictedFnId;
use modulus_core::eisenstein::{
    eisenstein_lattice, eisenstein_value, g2_iterated, q_side_derivative_residual,
    weight_law_residual, zeta_value,
};
use modulus_core::modular_group::{covering_audit, moebius_apply, HalfPlanePoint};
use modulus_core::modular_j::{
    j_derivative, j_eval, j_transformation_residual, jtilde_tamed, rho,
    sample_derivative_law_pair, sample_invariance_pair,
};
use modulus_core::power_series::{
    recomposition_residual, sample_division_instance, weierstrass_divide,
    weierstrass_divide_reference,
};
use modulus_core::q_transform::{neighbor_matrix, neighbor_q, q_from_tau, tau_from_q};
use modulus_core::sampling;
use modulus_core::structures::{
    delta_cutoff, evaluate_symbol, StructureId, SymbolRef, DEFAULT_INDEX_CAP,
};
use modulus_core::Complex;
use num_traits::Zero;

fn point(re: f64, im: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(Complex::new(re, im)).unwrap()
}

#[test]
fn criterion_01_normalization_anchors() {
    let start = Instant::now();
    let at_i = j_eval(&point(0.0, 1.0)).unwrap();
    let at_rho = j_eval(&rho()).unwrap();
    let dev_i = (at_i - Complex::ONE).abs();
    let dev_rho = at_rho.abs();
    let dt = start.elapsed();
    assert!(dev_i <= 1e-9, "J(i) off by {:e}", dev_i);
    assert!(dev_rho <= 1e-9, "J(rho) off by {:e}", dev_rho);
    assert!(dt < Duration::from_millis(100), "took {:?}", dt);
    println!(
        "criterion 1: PASS |J(i)-1| = {:.2e}, |J(rho)| = {:.2e} <= 1e-9 ({:.1?})",
        dev_i, dev_rho, dt
    );
}

#[test]
fn criterion_02_modular_invariance() {
    let start = Instant::now();
    let mut rng = sampling::rng(42);
    let mut max = 0.0f64;
    for _ in 0..500 {
        let (g, t) = sample_invariance_pair(&mut rng, 6);
        let r = j_transformation_residual(&g, &t, 0).unwrap();
        max = max.max(r);
    }
    let dt = start.elapsed();
    assert!(max <= 1e-8, "max invariance residual {:e}", max);
    assert!(dt < Duration::from_secs(5), "took {:?}", dt);
    println!(
        "criterion 2: PASS max |J(g t) - J(t)| = {:.2e} <= 1e-8 (500 pairs, {:.2?})",
        max, dt
    );
}

#[test]
fn criterion_03_derivative_transformation_laws() {
    let start = Instant::now();
    let mut rng = sampling::rng(43);
    let mut max = [0.0f64; 2];
    for _ in 0..200 {
        let (g, t) = sample_derivative_law_pair(&mut rng, 6);
        for order in [1usize, 2] {
            let r = j_transformation_residual(&g, &t, order).unwrap();
            max[order - 1] = max[order - 1].max(r);
        }
    }
    let dt = start.elapsed();
    assert!(max[0] <= 1e-6, "J' law residual {:e}", max[0]);
    assert!(max[1] <= 1e-6, "J'' law residual {:e}", max[1]);
    assert!(dt < Duration::from_secs(5), "took {:?}", dt);
    println!(
        "criterion 3: PASS J' law {:.2e}, J'' law {:.2e} <= 1e-6 (200 pairs, {:.2?})",
        max[0], max[1], dt
    );
}

#[test]
fn criterion_04_weight_laws() {
    let start = Instant::now();
    let mut rng = sampling::rng(44);
    let mut max_high = 0.0f64;
    let mut max_g2 = 0.0f64;
    for _ in 0..200 {
        let (g, t) = sampling::sample_law_pair(&mut rng, 6, (0.3, 1.2), 10.0);
        for k in [4u32, 6] {
            max_high = max_high.max(weight_law_residual(k, &g, &t).unwrap());
        }
        max_g2 = max_g2.max(weight_law_residual(2, &g, &t).unwrap());
    }
    let dt = start.elapsed();
    assert!(max_high <= 1e-8, "E4/E6 law residual {:e}", max_high);
    assert!(max_g2 <= 1e-6, "G2 anomaly residual {:e}", max_g2);
    assert!(dt < Duration::from_secs(5), "took {:?}", dt);
    println!(
        "criterion 4: PASS E4/E6 laws {:.2e} <= 1e-8, G2 anomaly {:.2e} <= 1e-6 (200 pairs, {:.2?})",
        max_high, max_g2, dt
    );
}

#[test]
fn criterion_05_ramanujan_identities_exact() {
    let start = Instant::now();
    for k in [2u32, 4, 6] {
        let residual = q_side_derivative_residual(k, 64).unwrap();
        assert!(residual.is_zero(), "k = {}: residual {}", k, residual);
    }
    let dt = start.elapsed();
    assert!(dt < Duration::from_secs(1), "took {:?}", dt);
    println!(
        "criterion 5: PASS all three q-side identities identically 0 through order 64 ({:.2?})",
        dt
    );
}

#[test]
fn criterion_06_forced_values() {
    let q_i = q_from_tau(&point(0.0, 1.0)).unwrap().value();
    let q_rho = q_from_tau(&rho()).unwrap().value();

    let e6_i = eisenstein_value(6, q_i).unwrap().abs();
    let e4_rho = eisenstein_value(4, q_rho).unwrap().abs();
    let e2_i = (eisenstein_value(2, q_i).unwrap().re - 3.0 / std::f64::consts::PI).abs();
    let j1_i = j_derivative(&point(0.0, 1.0), 1).unwrap().abs();

    assert!(e6_i <= 1e-9, "E6(i) = {:e}", e6_i);
    assert!(e4_rho <= 1e-9, "E4(rho) = {:e}", e4_rho);
    assert!(e2_i <= 1e-9, "E2(i) - 3/pi = {:e}", e2_i);
    assert!(j1_i <= 1e-8, "J'(i) = {:e}", j1_i);
    println!(
        "criterion 6: PASS |E6(i)| = {:.2e}, |E4(rho)| = {:.2e}, |E2(i)-3/pi| = {:.2e} <= 1e-9, |J'(i)| = {:.2e} <= 1e-8",
        e6_i, e4_rho, e2_i, j1_i
    );
}

#[test]
fn criterion_07_cross_method_oracle() {
    let start = Instant::now();
    let mut rng = sampling::rng(47);
    let zeta2 = zeta_value(2).unwrap();
    let mut max_high = 0.0f64;
    let mut max_g2 = 0.0f64;
    for _ in 0..100 {
        let t = sampling::sample_fundamental_domain(&mut rng, 2.0);
        let q = q_from_tau(&t).unwrap().value();
        for k in [4u32, 6] {
            let series = eisenstein_value(k, q).unwrap();
            let lattice = eisenstein_lattice(k, &t, 200).unwrap();
            max_high = max_high.max((series - lattice).abs());
        }
        let series_g2 = eisenstein_value(2, q).unwrap().scale(zeta2);
        let iterated = g2_iterated(&t, 400);
        max_g2 = max_g2.max((series_g2 - iterated).abs());
    }
    let dt = start.elapsed();
    assert!(max_high <= 1e-2, "lattice vs series deviation {:e}", max_high);
    assert!(max_g2 <= 5e-3, "G2 iterated vs series deviation {:e}", max_g2);
    assert!(dt < Duration::from_secs(30), "took {:?}", dt);
    println!(
        "criterion 7: PASS lattice(M=200) vs series {:.2e} <= 1e-2, G2(M=400) {:.2e} <= 5e-3 (100 points, {:.2?})",
        max_high, max_g2, dt
    );
}

#[test]
fn criterion_08_covering_property() {
    let start = Instant::now();
    let report = covering_audit(10_000, 48);
    let dt = start.elapsed();
    assert!(
        report.failures.is_empty(),
        "{} uncovered points, first {:?}",
        report.failures.len(),
        report.failures.first()
    );
    assert!(dt < Duration::from_secs(1), "took {:?}", dt);
    println!(
        "criterion 8: PASS 10^4 strip samples covered by the four tiles, 0 failures ({:.2?})",
        dt
    );
}

#[test]
fn criterion_09_q_map_consistency() {
    let mut rng = sampling::rng(49);
    let mut max_neighbor = 0.0f64;
    for _ in 0..1_000 {
        let q = modulus_core::q_transform::PuncturedDiskPoint::new(sampling::sample_annulus(
            &mut rng, 0.05, 0.9,
        ))
        .unwrap();
        for j in 1..=3usize {
            let direct = neighbor_q(&q, j).unwrap().value();
            let g = neighbor_matrix(j).unwrap();
            let via_tau = q_from_tau(&moebius_apply(&g, &tau_from_q(&q)))
                .unwrap()
                .value();
            max_neighbor = max_neighbor.max((direct - via_tau).abs());
        }
    }
    assert!(max_neighbor <= 1e-10, "neighbor deviation {:e}", max_neighbor);

    let mut max_round = 0.0f64;
    for _ in 0..10_000 {
        let t = sampling::sample_strip(&mut rng, 0.3, 3.0);
        let back = tau_from_q(&q_from_tau(&t).unwrap());
        max_round = max_round.max((back.value() - t.value()).abs());
    }
    assert!(max_round <= 1e-11, "round trip deviation {:e}", max_round);
    println!(
        "criterion 9: PASS neighbor maps {:.2e} <= 1e-10 (10^3 points), round trip {:.2e} <= 1e-11 (10^4 points)",
        max_neighbor, max_round
    );
}

#[test]
fn criterion_10_weierstrass_division() {
    let start = Instant::now();
    let mut rng = sampling::rng(50);
    for i in 0..100 {
        let (f, g, trunc) = sample_division_instance(&mut rng);
        let division = weierstrass_divide(&f, &g, trunc).unwrap();
        let residual = recomposition_residual(&f, &g, &division).unwrap();
        assert!(residual.is_zero(), "instance {}: nonzero residual", i);
        let reference = weierstrass_divide_reference(&f, &g, trunc).unwrap();
        assert_eq!(division, reference, "instance {}: routes disagree", i);
    }
    let dt = start.elapsed();
    assert!(dt < Duration::from_secs(10), "took {:?}", dt);
    println!(
        "criterion 10: PASS 100 instances: recomposition exactly 0, oracle agreement exact ({:.2?})",
        dt
    );
}

#[test]
fn criterion_11_structure_semantics() {
    let sym = |structure: StructureId, name: &str, indices: &[u32]| SymbolRef {
        structure,
        name: name.into(),
        indices: indices.to_vec(),
    };
    let eval = |s: &SymbolRef, args: &[f64]| evaluate_symbol(s, args, DEFAULT_INDEX_CAP).unwrap();

    let mut checks = 0usize;
    // disk cutoffs: 1e-12 past the radius, and the nearest representable
    // point strictly outside (1e-300 is below one ulp at these radii)
    let disk_cases = [
        (sym(StructureId::RJ1, "F", &[0, 1]), 0.5),
        (sym(StructureId::RJ1, "G", &[2, 32]), 1.0 - 1.0 / 33.0),
        (sym(StructureId::RJ2, "Jtre", &[1]), 1.0 - delta_cutoff()),
        (sym(StructureId::RM1, "F", &[4, 3]), 0.75),
        (sym(StructureId::RM2, "Etim", &[6]), 1.0 - delta_cutoff()),
    ];
    for (s, radius) in &disk_cases {
        for x in [radius + 1e-12, radius.next_up()] {
            assert_eq!(eval(s, &[x, 0.0]), 0.0, "{:?} at {:e}", s.name, x);
            assert_eq!(eval(s, &[0.0, -x]), 0.0);
            checks += 2;
        }
    }
    // strip cutoffs on both boundary pieces
    let y_edge = 3f64.sqrt() / 2.0;
    for s in [
        sym(StructureId::RJ, "Jre", &[0]),
        sym(StructureId::RJ, "Jim", &[2]),
        sym(StructureId::RM, "Ere", &[2]),
        sym(StructureId::RM, "Eim", &[6]),
    ] {
        for x in [0.5 + 1e-12, 0.5f64.next_up(), -0.5 - 1e-12, (-0.5f64).next_down()] {
            assert_eq!(eval(&s, &[x, 1.0]), 0.0);
            checks += 1;
        }
        for y in [y_edge - 1e-12, y_edge.next_down()] {
            assert_eq!(eval(&s, &[0.0, y]), 0.0);
            checks += 1;
        }
    }
    // interval cutoffs, including the representable 1e-300 below zero
    let interval_cases: [(StructureId, &str, RestrictedFnId); 5] = [
        (StructureId::RJ2, "exp", RestrictedFnId::ExpUnit),
        (StructureId::RJ2, "log", RestrictedFnId::LogUnitTwo),
        (StructureId::RM2, "sin", RestrictedFnId::SinSym),
        (StructureId::RM2, "cos", RestrictedFnId::CosSym),
        (StructureId::RM2, "arctan", RestrictedFnId::ArctanUnit),
    ];
    for (structure, name, f) in interval_cases {
        let (lo, hi) = f.interval().unwrap();
        let s = sym(structure, name, &[]);
        let mut outside = vec![lo - 1e-12, hi + 1e-12, lo.next_down(), hi.next_up()];
        if lo == 0.0 {
            outside.push(-1e-300);
        }
        for x in outside {
            assert_eq!(eval(&s, &[x]), 0.0, "{} at {:e}", name, x);
            checks += 1;
        }
    }

    // overlap consistency between the capped-family and fixed-disk evaluators
    let mut rng = sampling::rng(51);
    let mut max_gap = 0.0f64;
    for _ in 0..50 {
        let q = sampling::sample_annulus(&mut rng, 0.05, 0.9);
        for j in 0..=2u32 {
            let f = eval(&sym(StructureId::RJ1, "F", &[j, 32]), &[q.re, q.im]);
            let re = eval(&sym(StructureId::RJ2, "Jtre", &[j]), &[q.re, q.im]);
            let g = eval(&sym(StructureId::RJ1, "G", &[j, 32]), &[q.re, q.im]);
            let im = eval(&sym(StructureId::RJ2, "Jtim", &[j]), &[q.re, q.im]);
            max_gap = max_gap.max((f - re).abs()).max((g - im).abs());
        }
    }
    assert!(max_gap <= 1e-10, "overlap deviation {:e}", max_gap);
    println!(
        "criterion 11: PASS {} boundary points bit-exact 0.0; RJ1/RJ2 overlap {:.2e} <= 1e-10",
        checks, max_gap
    );
}

#[test]
fn criterion_12_pole_behavior() {
    // shrinking q confirms q J~(q) settles to a constant, and the constant
    // read off the data is 1/1728
    let tamed = |r: f64| jtilde_tamed(Complex::new(r, 0.0), 0).unwrap();
    let t6 = tamed(1e-6);
    let t7 = tamed(1e-7);
    let t8 = tamed(1e-8);
    let d1 = (t7 - t6).abs();
    let d2 = (t8 - t7).abs();
    assert!(d2 < d1, "differences not shrinking: {:e} then {:e}", d1, d2);
    let constant = 1.0 / t8.re;
    assert!(
        (constant - 1728.0).abs() <= 0.05,
        "extracted constant {}",
        constant
    );
    let headline = (t6.scale(1728.0) - Complex::ONE).abs();
    assert!(headline <= 1e-3, "|1728 q J~(q) - 1| = {:e}", headline);
    println!(
        "criterion 12: PASS |1728 q J~(q) - 1| = {:.2e} <= 1e-3 at q = 1e-6; Cauchy constant {:.3} (differences {:.1e} -> {:.1e})",
        headline, constant, d1, d2
    );
}

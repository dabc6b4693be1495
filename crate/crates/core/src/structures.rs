//! Symbol tables and a total evaluator for the six definable structures
//! built on J and on the Eisenstein series: restricted function symbols on
//! q-disks or on the half-plane strip, extended by exactly zero outside
//! their domain predicate.

use std::f64::consts::PI;

use crate::complex::{restricted_eval, Complex, RestrictedFnId};
use crate::eisenstein;
use crate::error::{Error, Result};
use crate::modular_group::HalfPlanePoint;
use crate::modular_j;
use crate::q_transform::{q_from_tau, PuncturedDiskPoint};

/// Largest family index n accepted when no configuration overrides it.
pub const DEFAULT_INDEX_CAP: u32 = 32;

/// Raw disk symbols refuse to evaluate this close to the origin, where the
/// underlying function has its pole; the q-scaled symbols stay total.
pub const POLE_GUARD: f64 = 1e-8;

/// Cutoff of the fixed evaluation disk, 1 - exp(-pi sqrt(3)).
pub fn delta_cutoff() -> f64 {
    (-PI * 3f64.sqrt()).exp()
}

fn family_radius(n: u32) -> f64 {
    1.0 - 1.0 / (n as f64 + 1.0)
}

fn strip_contains(x: f64, y: f64) -> bool {
    x.abs() <= 0.5 && y >= 3f64.sqrt() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureId {
    RJ1,
    RJ2,
    RJ,
    RM1,
    RM2,
    RM,
}

impl StructureId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "RJ1" => Ok(StructureId::RJ1),
            "RJ2" => Ok(StructureId::RJ2),
            "RJ" => Ok(StructureId::RJ),
            "RM1" => Ok(StructureId::RM1),
            "RM2" => Ok(StructureId::RM2),
            "RM" => Ok(StructureId::RM),
            other => Err(Error::Parse(format!("unknown structure {:?}", other))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureId::RJ1 => "RJ1",
            StructureId::RJ2 => "RJ2",
            StructureId::RJ => "RJ",
            StructureId::RM1 => "RM1",
            StructureId::RM2 => "RM2",
            StructureId::RM => "RM",
        }
    }

    pub fn all() -> [StructureId; 6] {
        [
            StructureId::RJ1,
            StructureId::RJ2,
            StructureId::RJ,
            StructureId::RM1,
            StructureId::RM2,
            StructureId::RM,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    RealPart,
    ImaginaryPart,
    RealFunction,
}

#[derive(Debug, Clone)]
pub struct IndexRange {
    pub label: &'static str,
    pub values: Vec<u32>,
}

/// One function symbol family of a structure: base name, admissible
/// indices, arity in real arguments, and the domain outside which it is
/// identically zero.
#[derive(Debug, Clone)]
pub struct StructureSymbol {
    pub name: &'static str,
    pub arity: usize,
    pub component: Component,
    pub indices: Vec<IndexRange>,
    pub domain: String,
}

fn j_indices() -> IndexRange {
    IndexRange {
        label: "j",
        values: vec![0, 1, 2],
    }
}

fn weight_indices() -> IndexRange {
    IndexRange {
        label: "k",
        values: vec![2, 4, 6],
    }
}

fn n_indices(cap: u32) -> IndexRange {
    IndexRange {
        label: "n",
        values: (1..=cap).collect(),
    }
}

const FAMILY_DISK: &str = "|q| <= 1 - 1/(n+1)";
const DELTA_DISK: &str = "|q| <= 1 - exp(-pi sqrt(3))";
const STRIP: &str = "|x| <= 1/2 and y >= sqrt(3)/2";

fn families(
    base: [&'static str; 2],
    tamed: Option<[&'static str; 2]>,
    indices: &[IndexRange],
    domain: &str,
) -> Vec<StructureSymbol> {
    let mut pairs = vec![
        (base[0], Component::RealPart),
        (base[1], Component::ImaginaryPart),
    ];
    if let Some(t) = tamed {
        pairs.push((t[0], Component::RealPart));
        pairs.push((t[1], Component::ImaginaryPart));
    }
    pairs
        .into_iter()
        .map(|(name, component)| StructureSymbol {
            name,
            arity: 2,
            component,
            indices: indices.to_vec(),
            domain: domain.into(),
        })
        .collect()
}

fn elemental_symbol(name: &'static str, f: RestrictedFnId) -> StructureSymbol {
    let domain = match f.interval() {
        Some((lo, hi)) => format!("[{}, {}]", lo, hi),
        None => "all reals".into(),
    };
    StructureSymbol {
        name,
        arity: 1,
        component: Component::RealFunction,
        indices: Vec::new(),
        domain,
    }
}

fn restricted_five() -> Vec<StructureSymbol> {
    vec![
        elemental_symbol("exp", RestrictedFnId::ExpUnit),
        elemental_symbol("log", RestrictedFnId::LogUnitTwo),
        elemental_symbol("sin", RestrictedFnId::SinSym),
        elemental_symbol("cos", RestrictedFnId::CosSym),
        elemental_symbol("arctan", RestrictedFnId::ArctanUnit),
    ]
}

/// Full signature of a structure. The q-scaled companions of the disk
/// symbols are listed alongside the plain ones.
pub fn list_symbols(s: StructureId, index_cap: u32) -> Vec<StructureSymbol> {
    match s {
        StructureId::RJ1 => families(
            ["F", "G"],
            Some(["qF", "qG"]),
            &[j_indices(), n_indices(index_cap)],
            FAMILY_DISK,
        ),
        StructureId::RJ2 => {
            let mut out = restricted_five();
            out.extend(families(
                ["Jtre", "Jtim"],
                Some(["qJtre", "qJtim"]),
                &[j_indices()],
                DELTA_DISK,
            ));
            out
        }
        StructureId::RJ => vec![
            StructureSymbol {
                name: "Jre",
                arity: 2,
                component: Component::RealPart,
                indices: vec![IndexRange {
                    label: "k",
                    values: vec![0, 1, 2],
                }],
                domain: STRIP.into(),
            },
            StructureSymbol {
                name: "Jim",
                arity: 2,
                component: Component::ImaginaryPart,
                indices: vec![IndexRange {
                    label: "k",
                    values: vec![0, 1, 2],
                }],
                domain: STRIP.into(),
            },
            elemental_symbol("sin", RestrictedFnId::SinSym),
            elemental_symbol("cos", RestrictedFnId::CosSym),
            elemental_symbol("exp", RestrictedFnId::ExpFull),
        ],
        StructureId::RM1 => families(
            ["F", "G"],
            None,
            &[weight_indices(), n_indices(index_cap)],
            FAMILY_DISK,
        ),
        StructureId::RM2 => {
            let mut out = restricted_five();
            out.extend(families(
                ["Etre", "Etim"],
                None,
                &[weight_indices()],
                DELTA_DISK,
            ));
            out
        }
        StructureId::RM => vec![
            StructureSymbol {
                name: "Ere",
                arity: 2,
                component: Component::RealPart,
                indices: vec![weight_indices()],
                domain: STRIP.into(),
            },
            StructureSymbol {
                name: "Eim",
                arity: 2,
                component: Component::ImaginaryPart,
                indices: vec![weight_indices()],
                domain: STRIP.into(),
            },
            elemental_symbol("exp", RestrictedFnId::ExpFull),
            elemental_symbol("sin", RestrictedFnId::SinSym),
            elemental_symbol("cos", RestrictedFnId::CosSym),
        ],
    }
}

/// A concrete symbol instance: structure, base name, index values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRef {
    pub structure: StructureId,
    pub name: String,
    pub indices: Vec<u32>,
}

/// Parses "structure.symbol[i, j]" paths, e.g. "RJ.Jre[0]" or "RM1.F[4,7]".
pub fn parse_symbol_path(path: &str) -> Result<SymbolRef> {
    let (sid, rest) = path
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("expected structure.symbol, got {:?}", path)))?;
    let structure = StructureId::parse(sid)?;
    let (name, indices) = match rest.split_once('[') {
        Some((base, idx)) => {
            let inner = idx
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("missing closing bracket in {:?}", path)))?;
            let mut values = Vec::new();
            for part in inner.split(',') {
                let v: u32 = part.trim().parse().map_err(|_| {
                    Error::Parse(format!("bad index {:?} in {:?}", part.trim(), path))
                })?;
                values.push(v);
            }
            (base, values)
        }
        None => (rest, Vec::new()),
    };
    if name.is_empty() {
        return Err(Error::Parse(format!("empty symbol name in {:?}", path)));
    }
    Ok(SymbolRef {
        structure,
        name: name.to_string(),
        indices,
    })
}

fn unknown_symbol(sym: &SymbolRef) -> Error {
    Error::Usage(format!(
        "structure {} has no symbol {:?}",
        sym.structure.name(),
        sym.name
    ))
}

fn expect_indices(sym: &SymbolRef, count: usize) -> Result<()> {
    if sym.indices.len() != count {
        return Err(Error::Usage(format!(
            "symbol {} takes {} index(es), got {}",
            sym.name,
            count,
            sym.indices.len()
        )));
    }
    Ok(())
}

fn expect_args(args: &[f64], arity: usize, name: &str) -> Result<()> {
    if args.len() != arity {
        return Err(Error::Usage(format!(
            "symbol {} takes {} argument(s), got {}",
            name,
            arity,
            args.len()
        )));
    }
    Ok(())
}

fn check_derivative_index(j: u32) -> Result<usize> {
    if j > 2 {
        return Err(Error::Usage(format!("derivative index {} not in 0..=2", j)));
    }
    Ok(j as usize)
}

fn check_weight(k: u32) -> Result<u32> {
    if k == 2 || k == 4 || k == 6 {
        Ok(k)
    } else {
        Err(Error::Usage(format!("weight {} not one of 2, 4, 6", k)))
    }
}

fn check_family_index(n: u32, cap: u32) -> Result<u32> {
    if n == 0 || n > cap {
        return Err(Error::Usage(format!(
            "family index {} outside the configured range 1..={}",
            n, cap
        )));
    }
    Ok(n)
}

fn component_of(v: Complex, c: Component) -> f64 {
    match c {
        Component::RealPart => v.re,
        Component::ImaginaryPart => v.im,
        Component::RealFunction => unreachable!("scalar symbols never reach here"),
    }
}

fn jtilde_disk_value(
    args: &[f64],
    radius: f64,
    j: usize,
    tamed: bool,
    comp: Component,
) -> Result<f64> {
    let q = Complex::new(args[0], args[1]);
    // the domain predicate decides first; outside it the value is exact zero
    if !(args[0].hypot(args[1]) <= radius) {
        return Ok(0.0);
    }
    let v = if tamed {
        modular_j::jtilde_tamed(q, j)?
    } else {
        if q.abs() < POLE_GUARD {
            return Err(Error::Precision(format!(
                "|q| = {:e} is within {:e} of the pole; use the q-scaled symbol",
                q.abs(),
                POLE_GUARD
            )));
        }
        modular_j::jtilde_derivative(&PuncturedDiskPoint::new(q)?, j)?
    };
    Ok(component_of(v, comp))
}

fn eisenstein_disk_value(args: &[f64], radius: f64, k: u32, comp: Component) -> Result<f64> {
    let q = Complex::new(args[0], args[1]);
    if !(args[0].hypot(args[1]) <= radius) {
        return Ok(0.0);
    }
    let v = eisenstein::eisenstein_value(k, q)?;
    Ok(component_of(v, comp))
}

fn elemental_id(structure: StructureId, name: &str) -> Option<RestrictedFnId> {
    use StructureId::*;
    match (structure, name) {
        (RJ2 | RM2, "exp") => Some(RestrictedFnId::ExpUnit),
        (RJ2 | RM2, "log") => Some(RestrictedFnId::LogUnitTwo),
        (RJ2 | RM2 | RJ | RM, "sin") => Some(RestrictedFnId::SinSym),
        (RJ2 | RM2 | RJ | RM, "cos") => Some(RestrictedFnId::CosSym),
        (RJ2 | RM2, "arctan") => Some(RestrictedFnId::ArctanUnit),
        (RJ | RM, "exp") => Some(RestrictedFnId::ExpFull),
        _ => None,
    }
}

fn disk_family_kind(name: &str) -> Option<(bool, Component)> {
    match name {
        "F" => Some((false, Component::RealPart)),
        "G" => Some((false, Component::ImaginaryPart)),
        "qF" => Some((true, Component::RealPart)),
        "qG" => Some((true, Component::ImaginaryPart)),
        _ => None,
    }
}

/// Evaluates one symbol instance at a real argument tuple. Outside the
/// symbol's domain the result is bit-exact 0.0; unknown names, indices out
/// of range, and arity mismatches are usage errors.
pub fn evaluate_symbol(sym: &SymbolRef, args: &[f64], index_cap: u32) -> Result<f64> {
    if let Some(f) = elemental_id(sym.structure, &sym.name) {
        expect_indices(sym, 0)?;
        expect_args(args, 1, &sym.name)?;
        return Ok(restricted_eval(f, args[0]));
    }
    match sym.structure {
        StructureId::RJ1 => {
            let (tamed, comp) = disk_family_kind(&sym.name).ok_or_else(|| unknown_symbol(sym))?;
            expect_indices(sym, 2)?;
            expect_args(args, 2, &sym.name)?;
            let j = check_derivative_index(sym.indices[0])?;
            let n = check_family_index(sym.indices[1], index_cap)?;
            jtilde_disk_value(args, family_radius(n), j, tamed, comp)
        }
        StructureId::RJ2 => {
            let (tamed, comp) = match sym.name.as_str() {
                "Jtre" => (false, Component::RealPart),
                "Jtim" => (false, Component::ImaginaryPart),
                "qJtre" => (true, Component::RealPart),
                "qJtim" => (true, Component::ImaginaryPart),
                _ => return Err(unknown_symbol(sym)),
            };
            expect_indices(sym, 1)?;
            expect_args(args, 2, &sym.name)?;
            let j = check_derivative_index(sym.indices[0])?;
            jtilde_disk_value(args, 1.0 - delta_cutoff(), j, tamed, comp)
        }
        StructureId::RJ => {
            let comp = match sym.name.as_str() {
                "Jre" => Component::RealPart,
                "Jim" => Component::ImaginaryPart,
                _ => return Err(unknown_symbol(sym)),
            };
            expect_indices(sym, 1)?;
            expect_args(args, 2, &sym.name)?;
            let k = check_derivative_index(sym.indices[0])?;
            if !strip_contains(args[0], args[1]) {
                return Ok(0.0);
            }
            let t = HalfPlanePoint::new(Complex::new(args[0], args[1]))?;
            let v = if k == 0 {
                modular_j::j_eval(&t)?
            } else {
                modular_j::j_derivative(&t, k)?
            };
            Ok(component_of(v, comp))
        }
        StructureId::RM1 => {
            let (tamed, comp) = disk_family_kind(&sym.name).ok_or_else(|| unknown_symbol(sym))?;
            if tamed {
                return Err(unknown_symbol(sym));
            }
            expect_indices(sym, 2)?;
            expect_args(args, 2, &sym.name)?;
            let k = check_weight(sym.indices[0])?;
            let n = check_family_index(sym.indices[1], index_cap)?;
            eisenstein_disk_value(args, family_radius(n), k, comp)
        }
        StructureId::RM2 => {
            let comp = match sym.name.as_str() {
                "Etre" => Component::RealPart,
                "Etim" => Component::ImaginaryPart,
                _ => return Err(unknown_symbol(sym)),
            };
            expect_indices(sym, 1)?;
            expect_args(args, 2, &sym.name)?;
            let k = check_weight(sym.indices[0])?;
            eisenstein_disk_value(args, 1.0 - delta_cutoff(), k, comp)
        }
        StructureId::RM => {
            let comp = match sym.name.as_str() {
                "Ere" => Component::RealPart,
                "Eim" => Component::ImaginaryPart,
                _ => return Err(unknown_symbol(sym)),
            };
            expect_indices(sym, 1)?;
            expect_args(args, 2, &sym.name)?;
            let k = check_weight(sym.indices[0])?;
            if !strip_contains(args[0], args[1]) {
                return Ok(0.0);
            }
            let t = HalfPlanePoint::new(Complex::new(args[0], args[1]))?;
            let q = q_from_tau(&t)?;
            let v = eisenstein::eisenstein_value(k, q.value())?;
            Ok(component_of(v, comp))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::Rng;

    fn sym(structure: StructureId, name: &str, indices: &[u32]) -> SymbolRef {
        SymbolRef {
            structure,
            name: name.into(),
            indices: indices.to_vec(),
        }
    }

    fn eval(s: &SymbolRef, args: &[f64]) -> Result<f64> {
        evaluate_symbol(s, args, DEFAULT_INDEX_CAP)
    }

    #[test]
    fn strip_symbol_hits_the_corner_values() {
        // J(i) = 1 on the strip
        let v = eval(&sym(StructureId::RJ, "Jre", &[0]), &[0.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() <= 1e-9);
        let w = eval(&sym(StructureId::RJ, "Jim", &[0]), &[0.0, 1.0]).unwrap();
        assert!(w.abs() <= 1e-9);

        // the corner rho lies on both boundary pieces and J vanishes there
        let rho_x = -0.5;
        let rho_y = 3f64.sqrt() / 2.0;
        let v = eval(&sym(StructureId::RJ, "Jre", &[0]), &[rho_x, rho_y]).unwrap();
        assert!(v.abs() <= 1e-9);

        // E4(rho) = 0, again on the boundary, through the other structure
        let v = eval(&sym(StructureId::RM, "Ere", &[4]), &[rho_x, rho_y]).unwrap();
        assert!(v.abs() <= 1e-9);
        // E6(i) = 0 in the strip interior
        let v = eval(&sym(StructureId::RM, "Ere", &[6]), &[0.0, 1.0]).unwrap();
        assert!(v.abs() <= 1e-9);
    }

    #[test]
    fn zero_extension_is_bit_exact_outside() {
        let j0 = sym(StructureId::RJ, "Jre", &[0]);
        assert_eq!(eval(&j0, &[0.6, 1.0]).unwrap(), 0.0);
        assert_eq!(eval(&j0, &[0.5 + 1e-12, 1.0]).unwrap(), 0.0);
        assert_eq!(eval(&j0, &[0.0, 0.866]).unwrap(), 0.0);
        assert_eq!(
            eval(&sym(StructureId::RM, "Eim", &[2]), &[0.0, 0.8]).unwrap(),
            0.0
        );
        // disk families: just past the radius
        let r1 = family_radius(1);
        assert_eq!(r1, 0.5);
        let f01 = sym(StructureId::RJ1, "F", &[0, 1]);
        assert_eq!(eval(&f01, &[r1 + 1e-12, 0.0]).unwrap(), 0.0);
        assert_eq!(eval(&f01, &[0.4, 0.4]).unwrap(), 0.0); // |q| = 0.565.. > 1/2
        let delta_edge = 1.0 - delta_cutoff();
        assert_eq!(
            eval(&sym(StructureId::RJ2, "Jtre", &[0]), &[delta_edge + 1e-9, 0.0]).unwrap(),
            0.0
        );
        // NaN arguments fall outside every domain predicate
        assert_eq!(eval(&j0, &[f64::NAN, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn elementals_cut_off_at_their_intervals() {
        let e = sym(StructureId::RJ2, "exp", &[]);
        assert!((eval(&e, &[0.5]).unwrap() - 0.5f64.exp()).abs() < 1e-15);
        assert_eq!(eval(&e, &[1.5]).unwrap(), 0.0);
        // a boundary at zero has representable points arbitrarily close below
        assert_eq!(eval(&e, &[-1e-300]).unwrap(), 0.0);
        assert_eq!(eval(&e, &[0.0]).unwrap(), 1.0);

        // the same name is the unrestricted function one structure over
        let full = sym(StructureId::RJ, "exp", &[]);
        assert!((eval(&full, &[5.0]).unwrap() - 5f64.exp()).abs() < 1e-11);
        assert!((eval(&full, &[-3.0]).unwrap() - (-3f64).exp()).abs() < 1e-16);

        let log = sym(StructureId::RM2, "log", &[]);
        assert!((eval(&log, &[1.5]).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(eval(&log, &[0.99]).unwrap(), 0.0);

        let at = sym(StructureId::RM2, "arctan", &[]);
        assert!((eval(&at, &[1.0]).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(eval(&at, &[1.0 + 1e-12]).unwrap(), 0.0);
    }

    #[test]
    fn periodicity_is_broken_by_the_cutoff() {
        // J is 1-periodic, but the strip symbol only sees one period
        let j0 = sym(StructureId::RJ, "Jre", &[0]);
        let inside = eval(&j0, &[0.2, 1.1]).unwrap();
        let shifted = eval(&j0, &[1.2, 1.1]).unwrap();
        assert!(inside.abs() > 1e-3);
        assert_eq!(shifted, 0.0);
    }

    #[test]
    fn disk_and_delta_symbols_agree_on_the_overlap() {
        let mut rng = sampling::rng(71);
        for _ in 0..25 {
            let q = sampling::sample_annulus(&mut rng, 0.05, 0.9);
            let args = [q.re, q.im];
            for j in 0..=2u32 {
                let f = eval(&sym(StructureId::RJ1, "F", &[j, 32]), &args).unwrap();
                let re = eval(&sym(StructureId::RJ2, "Jtre", &[j]), &args).unwrap();
                assert!((f - re).abs() <= 1e-10, "j = {} at {:?}", j, q);
                let g = eval(&sym(StructureId::RJ1, "G", &[j, 32]), &args).unwrap();
                let im = eval(&sym(StructureId::RJ2, "Jtim", &[j]), &args).unwrap();
                assert!((g - im).abs() <= 1e-10);
            }
            for k in [2u32, 4, 6] {
                let f = eval(&sym(StructureId::RM1, "F", &[k, 32]), &args).unwrap();
                let re = eval(&sym(StructureId::RM2, "Etre", &[k]), &args).unwrap();
                assert!((f - re).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn conjugation_symmetry_of_the_disk_families() {
        let mut rng = sampling::rng(72);
        for _ in 0..25 {
            let q = sampling::sample_annulus(&mut rng, 0.05, 0.7);
            for j in 0..=2u32 {
                let f = sym(StructureId::RJ1, "F", &[j, 8]);
                let g = sym(StructureId::RJ1, "G", &[j, 8]);
                let f_plus = eval(&f, &[q.re, q.im]).unwrap();
                let f_minus = eval(&f, &[q.re, -q.im]).unwrap();
                let g_plus = eval(&g, &[q.re, q.im]).unwrap();
                let g_minus = eval(&g, &[q.re, -q.im]).unwrap();
                assert!((f_plus - f_minus).abs() <= 1e-10);
                assert!((g_plus + g_minus).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn tamed_symbols_reach_the_puncture() {
        let v = eval(&sym(StructureId::RJ2, "qJtre", &[0]), &[0.0, 0.0]).unwrap();
        assert!((v - 1.0 / 1728.0).abs() <= 1e-15);
        let v = eval(&sym(StructureId::RJ2, "qJtre", &[1]), &[0.0, 0.0]).unwrap();
        assert!((v + 1.0 / 1728.0).abs() <= 1e-15);
        let v = eval(&sym(StructureId::RJ1, "qF", &[2, 5]), &[0.0, 0.0]).unwrap();
        assert!((v - 1.0 / 864.0).abs() <= 1e-15);
        let v = eval(&sym(StructureId::RJ1, "qG", &[0, 5]), &[0.0, 0.0]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn raw_symbols_guard_the_pole() {
        let r = eval(&sym(StructureId::RJ2, "Jtre", &[0]), &[5e-9, 0.0]);
        assert!(matches!(r, Err(Error::Precision(_))));
        let r = eval(&sym(StructureId::RJ1, "G", &[1, 3]), &[0.0, 5e-9]);
        assert!(matches!(r, Err(Error::Precision(_))));
        // Eisenstein disks have no pole: the origin is a regular point
        let v = eval(&sym(StructureId::RM2, "Etre", &[4]), &[0.0, 0.0]).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn strip_and_disk_routes_agree_through_the_nome() {
        let mut rng = sampling::rng(73);
        for _ in 0..20 {
            let x = rng.gen_range(-0.5..=0.5);
            let y = rng.gen_range(0.87..2.0);
            let t = HalfPlanePoint::new(Complex::new(x, y)).unwrap();
            let q = q_from_tau(&t).unwrap().value();
            for k in [2u32, 4, 6] {
                let strip = eval(&sym(StructureId::RM, "Ere", &[k]), &[x, y]).unwrap();
                let disk = eval(&sym(StructureId::RM2, "Etre", &[k]), &[q.re, q.im]).unwrap();
                assert!((strip - disk).abs() <= 1e-10, "k = {} at {} + {}i", k, x, y);
            }
        }
    }

    #[test]
    fn index_and_arity_validation() {
        let cap = DEFAULT_INDEX_CAP;
        let bad = |s: SymbolRef, args: &[f64]| {
            matches!(evaluate_symbol(&s, args, cap), Err(Error::Usage(_)))
        };
        assert!(bad(sym(StructureId::RJ, "Jre", &[3]), &[0.0, 1.0]));
        assert!(bad(sym(StructureId::RJ, "Jre", &[0, 1]), &[0.0, 1.0]));
        assert!(bad(sym(StructureId::RJ, "Jre", &[0]), &[0.0]));
        assert!(bad(sym(StructureId::RJ, "nope", &[0]), &[0.0, 1.0]));
        assert!(bad(sym(StructureId::RM, "Ere", &[3]), &[0.0, 1.0]));
        assert!(bad(sym(StructureId::RM1, "F", &[4, 0]), &[0.1, 0.0]));
        assert!(bad(sym(StructureId::RM1, "F", &[4, 33]), &[0.1, 0.0]));
        assert!(bad(sym(StructureId::RM1, "F", &[3, 7]), &[0.1, 0.0]));
        assert!(bad(sym(StructureId::RJ2, "exp", &[1]), &[0.5]));
        assert!(bad(sym(StructureId::RJ2, "exp", &[]), &[0.5, 0.5]));
        assert!(bad(sym(StructureId::RJ1, "Jtre", &[0]), &[0.1, 0.0]));
        // arctan is not part of the strip structures
        assert!(bad(sym(StructureId::RJ, "arctan", &[]), &[0.5]));
        // a tighter configured cap rejects indices the default accepts
        let ok = sym(StructureId::RM1, "F", &[4, 7]);
        assert!(evaluate_symbol(&ok, &[0.1, 0.0], cap).is_ok());
        assert!(matches!(
            evaluate_symbol(&ok, &[0.1, 0.0], 5),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn path_grammar() {
        let s = parse_symbol_path("RJ.Jre[0]").unwrap();
        assert_eq!(s, sym(StructureId::RJ, "Jre", &[0]));
        let s = parse_symbol_path("RM1.F[4,7]").unwrap();
        assert_eq!(s, sym(StructureId::RM1, "F", &[4, 7]));
        let s = parse_symbol_path("RJ2.exp").unwrap();
        assert_eq!(s, sym(StructureId::RJ2, "exp", &[]));
        let s = parse_symbol_path("RJ1.qF[1, 3]").unwrap();
        assert_eq!(s, sym(StructureId::RJ1, "qF", &[1, 3]));

        for bad in ["bare", "RX.F[0]", "RJ.", "RJ.F[", "RJ.F[a]", "RJ.F[1]]"] {
            assert!(
                matches!(parse_symbol_path(bad), Err(Error::Parse(_))),
                "{:?} should not parse",
                bad
            );
        }
    }

    #[test]
    fn signature_listings() {
        let rj2 = list_symbols(StructureId::RJ2, DEFAULT_INDEX_CAP);
        let names: Vec<&str> = rj2.iter().map(|s| s.name).collect();
        for expected in ["exp", "log", "sin", "cos", "arctan", "Jtre", "Jtim"] {
            assert!(names.contains(&expected), "RJ2 missing {}", expected);
        }

        let rj = list_symbols(StructureId::RJ, DEFAULT_INDEX_CAP);
        let exp = rj.iter().find(|s| s.name == "exp").unwrap();
        assert_eq!(exp.domain, "all reals");
        assert!(rj.iter().all(|s| s.name != "arctan"));

        let rm = list_symbols(StructureId::RM, DEFAULT_INDEX_CAP);
        let ere = rm.iter().find(|s| s.name == "Ere").unwrap();
        assert_eq!(ere.indices[0].values, vec![2, 4, 6]);
        assert_eq!(ere.arity, 2);

        let rj1 = list_symbols(StructureId::RJ1, 32);
        assert_eq!(rj1.len(), 4);
        for s in &rj1 {
            assert_eq!(s.indices[0].values, vec![0, 1, 2]);
            assert_eq!(s.indices[1].values.len(), 32);
            assert_eq!(s.indices[1].values[0], 1);
            assert_eq!(s.domain, FAMILY_DISK);
        }

        let rm1 = list_symbols(StructureId::RM1, 8);
        assert!(rm1.iter().any(|s| s.name == "F"));
        assert_eq!(
            rm1.iter().find(|s| s.name == "G").unwrap().indices[0].values,
            vec![2, 4, 6]
        );
    }

    #[test]
    fn evaluation_through_parsed_paths() {
        let s = parse_symbol_path("RJ.Jre[0]").unwrap();
        let v = evaluate_symbol(&s, &[0.0, 1.0], DEFAULT_INDEX_CAP).unwrap();
        assert!((v - 1.0).abs() <= 1e-9);
        let s = parse_symbol_path("RJ.Jre[0]").unwrap();
        assert_eq!(evaluate_symbol(&s, &[0.6, 1.0], DEFAULT_INDEX_CAP).unwrap(), 0.0);
    }
}

//! Rectangular grid emission for plots: sample a region, evaluate one
//! quantity per node, write CSV or JSON. Rendering is out of scope.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use modulus_core::modular_group::{
    fd_membership, reduce_to_fd, tile_membership, FdVariant, HalfPlanePoint, Tile,
};
use modulus_core::modular_j::j_eval;
use modulus_core::q_transform::{tau_from_q, PuncturedDiskPoint};
use modulus_core::{Complex, Error};

use crate::CliError;

pub const MAX_RES: usize = 4096;

#[derive(Clone, Copy)]
enum Region {
    FundamentalDomain,
    Strip,
    QDisk,
}

impl Region {
    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "fundamental-domain" => Ok(Region::FundamentalDomain),
            "strip" => Ok(Region::Strip),
            "q-disk" => Ok(Region::QDisk),
            _ => Err(Error::Usage(format!(
                "unknown region '{s}'; expected fundamental-domain, strip, or q-disk"
            ))),
        }
    }

    /// Axis ranges. The q-disk square stays inside the open unit disk so
    /// every node except the origin is a valid evaluation point.
    fn bounds(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Region::FundamentalDomain => ((-0.5, 0.5), (3.0f64.sqrt() / 2.0, 3.0)),
            Region::Strip => ((-0.5, 0.5), (1.0 / 3.0, 3.0)),
            Region::QDisk => ((-0.7, 0.7), (-0.7, 0.7)),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Quantity {
    AbsJ,
    ReJ,
    ImJ,
    TileIndex,
}

impl Quantity {
    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "absJ" => Ok(Quantity::AbsJ),
            "reJ" => Ok(Quantity::ReJ),
            "imJ" => Ok(Quantity::ImJ),
            "tile-index" => Ok(Quantity::TileIndex),
            _ => Err(Error::Usage(format!(
                "unknown quantity '{s}'; expected absJ, reJ, imJ, or tile-index"
            ))),
        }
    }
}

/// "WxH" with 1 <= W, H <= 4096. The unicode multiplication sign is accepted
/// because the resolutions are usually quoted that way.
fn parse_resolution(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Usage(format!("resolution '{s}' does not parse as WxH"));
    let (w, h) = s
        .split_once(['x', 'X', '\u{d7}'])
        .ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 || w > MAX_RES || h > MAX_RES {
        return Err(Error::Usage(format!(
            "resolution {w}x{h} outside 1..={MAX_RES} per axis"
        )));
    }
    Ok((w, h))
}

#[derive(Serialize)]
#[serde(untagged)]
enum Cell {
    Number(f64),
    Label(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Shortest round-trip float formatting: deterministic and exact.
            Cell::Number(v) => format!("{v}"),
            Cell::Label(s) => (*s).to_string(),
        }
    }
}

fn tile_label(p: &HalfPlanePoint) -> &'static str {
    if fd_membership(p, FdVariant::Closed) {
        "F"
    } else if tile_membership(p, Tile::S) {
        "S(F)"
    } else if tile_membership(p, Tile::St) {
        "ST(F)"
    } else if tile_membership(p, Tile::StInv) {
        "ST^-1(F)"
    } else {
        "none"
    }
}

fn complex_part(v: Result<Complex, Error>, q: Quantity) -> Cell {
    let v = match v {
        Ok(v) => v,
        Err(_) => return Cell::Number(f64::NAN),
    };
    Cell::Number(match q {
        Quantity::AbsJ => v.abs(),
        Quantity::ReJ => v.re,
        Quantity::ImJ => v.im,
        Quantity::TileIndex => unreachable!("tile-index handled separately"),
    })
}

fn cell_at(region: Region, quantity: Quantity, x: f64, y: f64) -> Cell {
    match region {
        Region::QDisk => {
            // Jtilde(q) = J(tau(q)); reducing tau first keeps the series
            // argument small, so the value stays accurate arbitrarily close
            // to the unit circle where direct evaluation would cancel out.
            let v = PuncturedDiskPoint::new(Complex::new(x, y))
                .and_then(|q| reduce_to_fd(&tau_from_q(&q)))
                .and_then(|r| j_eval(&r.reduced));
            complex_part(v, quantity)
        }
        Region::FundamentalDomain | Region::Strip => {
            let p = HalfPlanePoint::new(Complex::new(x, y)).expect("grid stays above Im = 0");
            if quantity == Quantity::TileIndex {
                Cell::Label(tile_label(&p))
            } else {
                complex_part(j_eval(&p), quantity)
            }
        }
    }
}

#[derive(Serialize)]
struct Row {
    x: f64,
    y: f64,
    value: Cell,
}

#[derive(Serialize)]
struct GridDocument {
    region: String,
    quantity: String,
    width: usize,
    height: usize,
    rows: Vec<Row>,
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        (lo + hi) / 2.0
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

pub fn run_grid(
    region: &str,
    res: &str,
    quantity: &str,
    out: &Path,
    format: &str,
) -> Result<(), CliError> {
    let reg = Region::parse(region)?;
    let qty = Quantity::parse(quantity)?;
    let (w, h) = parse_resolution(res)?;
    if matches!(reg, Region::QDisk) && qty == Quantity::TileIndex {
        return Err(Error::Usage(
            "tile-index labels half-plane points; use the strip or fundamental-domain region"
                .into(),
        )
        .into());
    }

    let ((x_lo, x_hi), (y_lo, y_hi)) = reg.bounds();
    let mut rows = Vec::with_capacity(w * h);
    for j in 0..h {
        let y = axis(y_lo, y_hi, h, j);
        for i in 0..w {
            let x = axis(x_lo, x_hi, w, i);
            rows.push(Row {
                x,
                y,
                value: cell_at(reg, qty, x, y),
            });
        }
    }

    let mut file = std::fs::File::create(out).map_err(CliError::Io)?;
    match format {
        "csv" => {
            let mut text = String::from("x,y,value\n");
            for r in &rows {
                text.push_str(&format!("{},{},{}\n", r.x, r.y, r.value.csv()));
            }
            file.write_all(text.as_bytes()).map_err(CliError::Io)?;
        }
        "json" => {
            let doc = GridDocument {
                region: region.to_string(),
                quantity: quantity.to_string(),
                width: w,
                height: h,
                rows,
            };
            let text = serde_json::to_string_pretty(&doc).expect("grid document serializes");
            file.write_all(text.as_bytes()).map_err(CliError::Io)?;
            file.write_all(b"\n").map_err(CliError::Io)?;
        }
        _ => {
            return Err(Error::Usage(format!(
                "unknown format '{format}'; expected csv or json"
            ))
            .into())
        }
    }
    Ok(())
}

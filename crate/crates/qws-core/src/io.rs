//! JSON input/output for graphs, coins and reports, and CSV band scans.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coins::{moving_shift_coin, CoinAssignment};
use crate::graph::{ArcPermutation, Graph};
use crate::lattice::BandRow;
use crate::linalg::{self, from_pairs, ONE};
use crate::spectral::{Ledger, SpectrumReport};
use crate::walk::{OneForm, Shift};
use crate::{c64, Error, Result};

/// `[re, im]`.
pub type Complex = [f64; 2];

fn to_c64(z: Complex) -> c64 {
    c64::new(z[0], z[1])
}

fn from_c64(z: c64) -> Complex {
    // `+ 0.0` turns `-0.0` into `0.0`.
    [z.re + 0.0, z.im + 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StandardSpec {
    Cycle { n: usize },
    Complete { n: usize },
    Bouquet { d: usize },
    Torus { dim: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftSpec {
    FlipFlop,
    /// Arc images `π(a)` in the crate's arc numbering.
    Permutation { perm: Vec<usize> },
    /// Moving shift on a torus built from [`StandardSpec::Torus`].
    Moving,
    /// One phase per arc.
    Twisted { theta: Vec<f64> },
}

/// Either `n` and `edges`, or `standard`; `shift` defaults to flip-flop.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<StandardSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftSpec>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<(Graph, Shift)> {
        let graph = match (&self.standard, self.n, &self.edges) {
            (Some(std), None, None) => match *std {
                StandardSpec::Cycle { n } => Graph::cycle(n)?,
                StandardSpec::Complete { n } => Graph::complete(n)?,
                StandardSpec::Bouquet { d } => Graph::bouquet(d)?,
                StandardSpec::Torus { dim, size } => Graph::hypercubic_torus(dim, size)?,
            },
            (None, Some(n), Some(edges)) => {
                let edges: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Graph::from_edges(n, &edges)?
            }
            _ => return Err(Error::Input("graph needs either \"n\" and \"edges\" or \"standard\"".into())),
        };
        let shift = match self.shift.clone().unwrap_or(ShiftSpec::FlipFlop) {
            ShiftSpec::FlipFlop => Shift::FlipFlop,
            ShiftSpec::Permutation { perm } => Shift::Permutation(ArcPermutation::new(perm)),
            ShiftSpec::Twisted { theta } => Shift::Twisted(OneForm::new(&graph, theta)?),
            ShiftSpec::Moving => match self.standard {
                Some(StandardSpec::Torus { dim, size }) => Shift::Permutation(ArcPermutation::moving_shift(dim, size)?),
                _ => return Err(Error::Input("moving shift requires a standard torus".into())),
            },
        };
        Ok((graph, shift))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinKind {
    /// `Gr(d(u))` at every vertex.
    Grover,
    /// `σ·Gr(2d)` at every vertex of a `2d`-regular graph.
    MovingGrover,
    /// Explicit matrices.
    Custom,
}

/// Coin file. Missing certificate fields default to `κ = 1`, `κ′ = −1` and
/// `p = 1` for Grover, `p = d + 1` for moving Grover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinSpec {
    pub kind: CoinKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_prime: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// One `d(u) × d(u)` matrix per vertex, rows of `[re, im]` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<Complex>>>>,
}

impl CoinSpec {
    pub fn build(&self, g: &Graph) -> Result<CoinAssignment> {
        let kappa = self.kappa.map(to_c64).unwrap_or(ONE);
        let kappa_prime = self.kappa_prime.map(to_c64).unwrap_or(-ONE);
        match self.kind {
            CoinKind::Grover => {
                CoinAssignment::grover(g)?.with_certificate(g, kappa, kappa_prime, self.p.unwrap_or(1))
            }
            CoinKind::MovingGrover => {
                let degree = g.degree(0);
                if !degree.is_multiple_of(2) || (0..g.n_vertices()).any(|u| g.degree(u) != degree) {
                    return Err(Error::Input("moving Grover coins need a 2d-regular graph".into()));
                }
                let d = degree / 2;
                CoinAssignment::uniform(g, &moving_shift_coin(d)?, kappa, kappa_prime, self.p.unwrap_or(d + 1))
            }
            CoinKind::Custom => {
                let raw = self
                    .matrices
                    .as_ref()
                    .ok_or_else(|| Error::Input("custom coins need \"matrices\"".into()))?;
                let p = self.p.ok_or_else(|| Error::Input("custom coins need \"p\"".into()))?;
                let matrices = raw
                    .iter()
                    .enumerate()
                    .map(|(u, rows)| from_pairs(rows).map_err(|e| e.context(format!("coin matrix {u}"))))
                    .collect::<Result<Vec<_>>>()?;
                CoinAssignment::new(g, matrices, kappa, kappa_prime, p)
            }
        }
    }

    pub fn custom(coins: &CoinAssignment) -> Self {
        CoinSpec {
            kind: CoinKind::Custom,
            kappa: Some(from_c64(coins.kappa())),
            kappa_prime: Some(from_c64(coins.kappa_prime())),
            p: Some(coins.p()),
            matrices: Some(coins.matrices().iter().map(linalg::to_pairs).collect()),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).context(path.display().to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::from(e).context(path.display().to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEntry {
    pub mu: f64,
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedEntry {
    pub mu: f64,
    pub mult: usize,
    pub lambdas: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub plus_kappa_prime: usize,
    pub minus_kappa_prime: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub kappa: Complex,
    pub kappa_prime: Complex,
    pub p: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub t_spectrum: Vec<MuEntry>,
    pub lifted: Vec<LiftedEntry>,
    pub residual: ResidualEntry,
    pub ledger: Ledger,
    pub ledger_identities: Vec<IdentityEntry>,
    pub total_eigenvalues: usize,
    pub oracle_delta: f64,
    pub max_lift_residual: f64,
    pub coin_identity_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charpoly_deviation: Option<f64>,
    pub pass: bool,
}

impl ReportJson {
    pub fn new(report: &SpectrumReport, pass: bool) -> Self {
        ReportJson {
            seed: None,
            kappa: from_c64(report.kappa),
            kappa_prime: from_c64(report.kappa_prime),
            p: report.p,
            n_vertices: report.n_vertices,
            n_edges: report.n_edges,
            t_spectrum: report.t_eigs.iter().map(|c| MuEntry { mu: c.mu, mult: c.multiplicity }).collect(),
            lifted: report
                .lifted
                .iter()
                .map(|l| LiftedEntry {
                    mu: l.pair.mu,
                    mult: l.multiplicity,
                    lambdas: l.pair.lambdas.iter().map(|&z| from_c64(z)).collect(),
                })
                .collect(),
            residual: ResidualEntry {
                plus_kappa_prime: report.residual.plus_kp,
                minus_kappa_prime: report.residual.minus_kp,
            },
            ledger: report.ledger,
            ledger_identities: report
                .ledger_identities()
                .into_iter()
                .map(|(name, holds)| IdentityEntry { name: name.to_string(), holds })
                .collect(),
            total_eigenvalues: report.predicted_spectrum().len(),
            oracle_delta: report.oracle_delta,
            max_lift_residual: report.max_lift_residual,
            coin_identity_residual: report.coin_identity_residual,
            charpoly_deviation: None,
            pass,
        }
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV header for a band scan in dimension `d` with `p × p` discriminant.
pub fn band_header(d: usize, p: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=d).map(|j| format!("k_{j}")).collect();
    h.extend((1..=p).map(|j| format!("mu_{j}")));
    h.extend((1..=2 * d).map(|j| format!("theta_{j}")));
    h.extend(["m_plus", "m_minus", "exceptional"].map(String::from));
    h
}

/// Writes band-scan rows as CSV, floats with 17 significant digits.
pub fn write_band_csv<W: Write>(out: W, d: usize, p: usize, rows: &[BandRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(band_header(d, p))?;
    for r in rows {
        if r.t_spectrum.len() != p || r.u_angles.len() != 2 * d || r.k.len() != d {
            return Err(Error::DimensionMismatch("band row has unexpected length".into()));
        }
        let mut rec: Vec<String> = r.k.iter().map(|&x| fmt_float(x)).collect();
        rec.extend(r.t_spectrum.iter().map(|&x| fmt_float(x)));
        rec.extend(r.u_angles.iter().map(|&x| fmt_float(x)));
        rec.push(r.m_plus.to_string());
        rec.push(r.m_minus.to_string());
        rec.push(r.exceptional.to_string());
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

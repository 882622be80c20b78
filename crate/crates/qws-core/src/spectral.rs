//! Spectral lifting from the discriminant `T` to the evolution `U`.
//!
//! Every eigenvalue `μ` of `T` lifts to the roots of
//! `λ² − (κ − κ′) μ λ − κ κ′ = 0`. At `μ = ±1` only `±κ` survives. The
//! remaining eigenvalues of `U` are `±κ′` on the orthogonal complement of
//! `L = K C^{p|V|} + S K C^{p|V|}`, with eigenspaces `ker K* ∩ ker(1 ∓ S)`.

use std::f64::consts::PI;

use faer::{Col, Mat};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coins::{kernel_cons, to_flipflop_coin, CoinAssignment, KernelBasis};
use crate::discriminant::{build_boundary, build_discriminant, verify_coin_identity};
use crate::error::ResultExt;
use crate::graph::Graph;
use crate::linalg::{self, ONE};
use crate::walk::{coin_matrix, dense_spectrum, evolution, shift_matrix, DenseOptions, Shift};
use crate::{c64, CMat, CVec, Error, Result};

/// `|μ ∓ 1|` below this routes to the boundary branch.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// `|κ + κ′|` below this selects the antipodal branch of the eigenvector lift.
pub const ANTIPODAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TCluster {
    pub mu: f64,
    pub multiplicity: usize,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMat,
}

/// Clustered eigendecomposition of a Hermitian discriminant.
///
/// Eigenvalues within `tol_cluster` of `±1` are snapped to `±1`.
pub fn eig_discriminant(t: &CMat, tol_cluster: f64) -> Result<Vec<TCluster>> {
    let herm = linalg::hermitian_residual(t);
    if !(herm <= 1e-10) {
        return Err(Error::NotHermitian(herm));
    }
    let (values, vectors) = linalg::hermitian_eigen(t)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - values[*g.last().unwrap()] <= tol_cluster => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|members| {
            let mean = members.iter().map(|&i| values[i]).sum::<f64>() / members.len() as f64;
            if mean.abs() > 1.0 + tol_cluster.max(BOUNDARY_TOL) {
                return Err(Error::EigenvalueOutOfRange(mean));
            }
            let mu = if (mean - 1.0).abs() <= tol_cluster.max(BOUNDARY_TOL) {
                1.0
            } else if (mean + 1.0).abs() <= tol_cluster.max(BOUNDARY_TOL) {
                -1.0
            } else {
                mean.clamp(-1.0, 1.0)
            };
            Ok(TCluster {
                mu,
                multiplicity: members.len(),
                vectors: vectors.get(.., members[0]..members[0] + members.len()).to_owned(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    Interior,
    BoundaryPlus,
    BoundaryMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPair {
    pub mu: f64,
    pub lambdas: Vec<c64>,
    pub kind: LiftKind,
}

/// `λ² − (κ − κ′) μ λ − κ κ′`.
pub fn lift_quadratic(mu: f64, lambda: c64, kappa: c64, kappa_prime: c64) -> c64 {
    lambda * lambda - (kappa - kappa_prime) * mu * lambda - kappa * kappa_prime
}

/// Roots of the lifting quadratic, written through `κ = e^{iξ}`, `κ′ = e^{iη}`
/// as `λ = e^{i(ξ+η)/2} e^{iψ}` with `sin ψ = μ sin((ξ − η)/2)`.
pub fn lift_eigenvalue(mu: f64, kappa: c64, kappa_prime: c64) -> Result<LiftedPair> {
    if !(mu.abs() <= 1.0 + BOUNDARY_TOL) {
        return Err(Error::EigenvalueOutOfRange(mu));
    }
    if (mu - 1.0).abs() <= BOUNDARY_TOL {
        return Ok(LiftedPair {
            mu,
            lambdas: vec![kappa],
            kind: LiftKind::BoundaryPlus,
        });
    }
    if (mu + 1.0).abs() <= BOUNDARY_TOL {
        return Ok(LiftedPair {
            mu,
            lambdas: vec![-kappa],
            kind: LiftKind::BoundaryMinus,
        });
    }
    let (xi, eta) = (kappa.arg(), kappa_prime.arg());
    let centre = c64::from_polar(1.0, 0.5 * (xi + eta));
    let s = (0.5 * (xi - eta)).sin();
    let psi = (mu * s).clamp(-1.0, 1.0).asin();
    let lambdas = vec![centre * c64::from_polar(1.0, psi), centre * c64::from_polar(1.0, PI - psi)];
    for &l in &lambdas {
        let r = lift_quadratic(mu, l, kappa, kappa_prime).norm();
        if !(r <= 1e-10) {
            return Err(Error::InconsistentLift(format!("quadratic residual {r:.3e} at mu = {mu}")));
        }
    }
    Ok(LiftedPair {
        mu,
        lambdas,
        kind: LiftKind::Interior,
    })
}

/// Lifts an eigenvector `g` of `T` (eigenvalue `μ`) to an eigenvector of `U`
/// for `λ`: `ψ = (I + κ′⁻¹ λ S) K g`, or `ψ = K g` when `κ + κ′ = 0` and
/// `λ = ±κ′`. The result is normalized.
#[allow(clippy::too_many_arguments)]
pub fn lift_eigenvector(
    g: &CVec,
    mu: f64,
    lambda: c64,
    k: &CMat,
    s: &CMat,
    kappa: c64,
    kappa_prime: c64,
) -> Result<CVec> {
    let q = lift_quadratic(mu, lambda, kappa, kappa_prime).norm();
    if !(q <= 1e-8) {
        return Err(Error::InconsistentLift(format!(
            "lambda = {lambda} is not a lift of mu = {mu} (residual {q:.3e})"
        )));
    }
    if (mu - 1.0).abs() <= BOUNDARY_TOL && (lambda - kappa).norm() > 1e-8 {
        return Err(Error::InconsistentLift(format!("mu = 1 lifts only to kappa, got {lambda}")));
    }
    if (mu + 1.0).abs() <= BOUNDARY_TOL && (lambda + kappa).norm() > 1e-8 {
        return Err(Error::InconsistentLift(format!("mu = -1 lifts only to -kappa, got {lambda}")));
    }
    let kg = k * g;
    let antipodal = (kappa + kappa_prime).norm() <= ANTIPODAL_TOL;
    let hits_kp = (lambda - kappa_prime).norm() <= 1e-8 || (lambda + kappa_prime).norm() <= 1e-8;
    let psi = if antipodal && hits_kp {
        kg.clone()
    } else {
        let skg = s * &kg;
        let coef = lambda / kappa_prime;
        Col::from_fn(kg.nrows(), |i| kg[i] + coef * skg[i])
    };
    let nrm = psi.norm_l2();
    if !(nrm > 1e-12 * kg.norm_l2().max(1e-300)) {
        return Err(Error::ZeroLift { mu });
    }
    Ok(Col::from_fn(psi.nrows(), |i| psi[i] / nrm))
}

/// Orthonormal bases of `ker K* ∩ ker(1 − S)` (eigenvalue `κ′` of `U`) and
/// `ker K* ∩ ker(1 + S)` (eigenvalue `−κ′`).
#[derive(Debug, Clone)]
pub struct ResidualSpace {
    pub plus: CMat,
    pub minus: CMat,
}

pub fn residual_eigenspace(k: &CMat, s: &CMat, tol: f64) -> Result<ResidualSpace> {
    let n = k.nrows();
    let proj = k * k.adjoint();
    let space = |sign: f64| -> Result<CMat> {
        let d = Mat::from_fn(n, n, |i, j| if i == j { ONE } else { linalg::ZERO } - s[(i, j)] * sign);
        let m = &proj + d.adjoint() * &d;
        linalg::psd_null_space(&m, tol)
    };
    Ok(ResidualSpace {
        plus: space(1.0)?,
        minus: space(-1.0)?,
    })
}

/// Largest relative deviation between `det(λ − U)` and
/// `(λ² − κ′²)^{|E| − p|V|} det(λ² − (κ − κ′) λ T − κ κ′)` over the samples.
///
/// A sample where either determinant is numerically singular is rotated
/// slightly and retried.
pub fn charpoly_identity_check(
    u: &CMat,
    t: &CMat,
    kappa: c64,
    kappa_prime: c64,
    p: usize,
    samples: &[c64],
) -> Result<f64> {
    if !u.nrows().is_multiple_of(2) || !t.nrows().is_multiple_of(p) {
        return Err(Error::DimensionMismatch("charpoly check dimensions".into()));
    }
    let n_edges = (u.nrows() / 2) as i64;
    let n_vertices = (t.nrows() / p) as i64;
    let exponent = (n_edges - p as i64 * n_vertices) as f64;
    let mut worst = 0.0f64;
    for &base in samples {
        let mut done = false;
        for attempt in 0..16 {
            let lambda = base * c64::from_polar(1.0, 0.013 * attempt as f64);
            let lhs_m = Mat::from_fn(u.nrows(), u.ncols(), |i, j| {
                (if i == j { lambda } else { linalg::ZERO }) - u[(i, j)]
            });
            let rhs_m = Mat::from_fn(t.nrows(), t.ncols(), |i, j| {
                let diag = if i == j { lambda * lambda - kappa * kappa_prime } else { linalg::ZERO };
                diag - (kappa - kappa_prime) * lambda * t[(i, j)]
            });
            let factor = lambda * lambda - kappa_prime * kappa_prime;
            let (Some(l), Some(r)) = (linalg::log_det(&lhs_m), linalg::log_det(&rhs_m)) else {
                continue;
            };
            if factor.norm() == 0.0 {
                continue;
            }
            let rhs = r + factor.ln() * exponent;
            worst = worst.max(((l - rhs).exp() - ONE).norm());
            done = true;
            break;
        }
        if !done {
            return Err(Error::Consistency(format!("no regular evaluation point near {base}")));
        }
    }
    Ok(worst)
}

/// `count` points on the circle `|λ| = radius`.
pub fn circle_samples(rng: &mut impl Rng, count: usize, radius: f64) -> Vec<c64> {
    (0..count)
        .map(|_| c64::from_polar(radius, rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

/// Smallest angular distance between paired points after the best cyclic
/// alignment of the two angle-sorted lists (bottleneck matching on the circle).
/// Returns infinity when the multisets differ in size.
pub fn circle_multiset_distance(a: &[c64], b: &[c64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let sorted = |v: &[c64]| {
        let mut out = v.to_vec();
        out.sort_by(|x, y| x.arg().rem_euclid(2.0 * PI).total_cmp(&y.arg().rem_euclid(2.0 * PI)));
        out
    };
    let (a, b) = (sorted(a), sorted(b));
    let n = a.len();
    let dist = |x: c64, y: c64| (x * y.conj()).arg().abs() + (x.norm() - y.norm()).abs();
    (0..n)
        .map(|shift| {
            let mut worst = 0.0f64;
            for i in 0..n {
                worst = worst.max(dist(a[i], b[(i + shift) % n]));
                if worst.is_nan() {
                    return f64::INFINITY;
                }
            }
            worst
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone)]
pub struct LiftedEigen {
    pub pair: LiftedPair,
    pub multiplicity: usize,
    /// Orthonormalized lifted eigenvectors, one matrix per entry of `pair.lambdas`.
    pub vectors: Vec<CMat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub m_plus: usize,
    pub m_minus: usize,
    #[serde(rename = "dim_L")]
    pub dim_l: usize,
    #[serde(rename = "dim_L_perp")]
    pub dim_l_perp: usize,
    #[serde(rename = "dim_O_cap_T")]
    pub dim_o_cap_t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidualCounts {
    pub plus_kp: usize,
    pub minus_kp: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub tol_cluster: f64,
    pub tol_residual: f64,
    pub oracle_tol: f64,
    pub dense_cap: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tol_cluster: crate::TOL_CLUSTER,
            tol_residual: crate::TOL_RESIDUAL,
            oracle_tol: 1e-7,
            dense_cap: 4096,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub kappa: c64,
    pub kappa_prime: c64,
    pub p: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub t_eigs: Vec<TCluster>,
    pub lifted: Vec<LiftedEigen>,
    pub residual: ResidualCounts,
    pub residual_space: ResidualSpace,
    pub ledger: Ledger,
    /// Bottleneck distance between the predicted spectrum and the dense oracle.
    pub oracle_delta: f64,
    /// Largest `‖Uψ − λψ‖ / ‖ψ‖` over lifted eigenvectors.
    pub max_lift_residual: f64,
    /// Columns lost when orthonormalizing lifted eigenvectors.
    pub lift_rank_deficit: usize,
    /// Distance of the lifted spectrum from `±κ′`; `None` when `κ + κ′ = 0`.
    pub exclusion_gap: Option<f64>,
    /// `‖C − (κ − κ′) KK* − κ′ I‖_F`.
    pub coin_identity_residual: f64,
    /// The dense oracle eigenvalues of `U`.
    pub oracle_spectrum: Vec<c64>,
}

impl SpectrumReport {
    /// Eigenvalues predicted from `T`, repeated by multiplicity.
    pub fn predicted_spectrum(&self) -> Vec<c64> {
        let mut out = Vec::new();
        for l in &self.lifted {
            for &lambda in &l.pair.lambdas {
                out.extend(std::iter::repeat_n(lambda, l.multiplicity));
            }
        }
        out.extend(std::iter::repeat_n(self.kappa_prime, self.residual.plus_kp));
        out.extend(std::iter::repeat_n(-self.kappa_prime, self.residual.minus_kp));
        out
    }

    /// The integer dimension identities, each as `(name, holds)`.
    pub fn ledger_identities(&self) -> Vec<(&'static str, bool)> {
        let l = &self.ledger;
        let pv = (self.p * self.n_vertices) as i64;
        let e = self.n_edges as i64;
        vec![
            ("dim_L = 2p|V| - (m_plus + m_minus)", l.dim_l as i64 == 2 * pv - (l.m_plus + l.m_minus) as i64),
            ("dim_O_cap_T = m_plus + m_minus", l.dim_o_cap_t == l.m_plus + l.m_minus),
            ("residual(+kappa') = |E| - p|V| + m_minus", self.residual.plus_kp as i64 == e - pv + l.m_minus as i64),
            ("residual(-kappa') = |E| - p|V| + m_plus", self.residual.minus_kp as i64 == e - pv + l.m_plus as i64),
            ("dim_L + residuals = 2|E|", l.dim_l + self.residual.plus_kp + self.residual.minus_kp == 2 * self.n_edges),
        ]
    }

    /// Fails when the oracle, an eigenvector residual, the exclusion rule or a
    /// dimension identity is violated.
    pub fn check(&self, opts: &ReportOptions) -> Result<()> {
        if !(self.oracle_delta <= opts.oracle_tol) {
            return Err(Error::OracleMismatch(format!(
                "predicted and dense spectra differ by {:.3e}",
                self.oracle_delta
            )));
        }
        if !(self.max_lift_residual <= opts.tol_residual) {
            return Err(Error::OracleMismatch(format!(
                "lifted eigenvector residual {:.3e}",
                self.max_lift_residual
            )));
        }
        if let Some(gap) = self.exclusion_gap {
            if !(gap > BOUNDARY_TOL) {
                return Err(Error::OracleMismatch(format!("lifted value within {gap:.3e} of ±kappa'")));
            }
        }
        if let Some((name, _)) = self.ledger_identities().into_iter().find(|(_, ok)| !ok) {
            return Err(Error::OracleMismatch(format!("dimension identity fails: {name}")));
        }
        Ok(())
    }
}

/// Runs the whole pipeline with the deterministic kernel basis of [`kernel_cons`].
pub fn full_report(g: &Graph, coins: &CoinAssignment, shift: &Shift, opts: &ReportOptions) -> Result<SpectrumReport> {
    full_report_with_basis(g, coins, None, shift, opts)
}

/// Runs the whole pipeline.
///
/// A general permutation shift is first rewritten in flip-flop form; the
/// declared certificate must then describe the rewritten coins. When `cons`
/// is given it must be a kernel basis for those coins.
pub fn full_report_with_basis(
    g: &Graph,
    coins: &CoinAssignment,
    cons: Option<&KernelBasis>,
    shift: &Shift,
    opts: &ReportOptions,
) -> Result<SpectrumReport> {
    let (coins, shift) = match shift {
        Shift::Permutation(pi) => (to_flipflop_coin(g, pi, coins)?, Shift::FlipFlop),
        other => (coins.clone(), other.clone()),
    };
    let owned;
    let cons = match cons {
        Some(c) => {
            crate::coins::certify_two_point_spectrum(&coins, opts.tol_cluster)?;
            c
        }
        None => {
            owned = kernel_cons(&coins, opts.tol_cluster)?;
            &owned
        }
    };
    let (kappa, kappa_prime, p) = (coins.kappa(), coins.kappa_prime(), coins.p());

    let s = shift_matrix(g, &shift)?;
    let c = coin_matrix(g, &coins)?;
    let u = evolution(&s, &c)?;
    let um = u.matrix();
    let k = build_boundary(g, cons).context("boundary operator")?;
    let t = build_discriminant(g, &k, &s).context("discriminant")?;
    let coin_identity_residual = verify_coin_identity(&k, &c, kappa, kappa_prime);
    if !(coin_identity_residual <= 1e-10) {
        return Err(Error::Consistency(format!(
            "coin identity residual {coin_identity_residual:.3e}"
        )));
    }

    let t_eigs = eig_discriminant(t.matrix(), opts.tol_cluster)?;
    let km = k.matrix();
    let sm = s.matrix();
    let mut lifted = Vec::with_capacity(t_eigs.len());
    let mut max_lift_residual = 0.0f64;
    let mut lift_rank_deficit = 0usize;
    for cluster in &t_eigs {
        let pair = lift_eigenvalue(cluster.mu, kappa, kappa_prime)?;
        let mut vectors = Vec::with_capacity(pair.lambdas.len());
        for &lambda in &pair.lambdas {
            let mut cols = Mat::<c64>::zeros(km.nrows(), cluster.multiplicity);
            for j in 0..cluster.multiplicity {
                let gvec = cluster.vectors.col(j).to_owned();
                let psi = lift_eigenvector(&gvec, cluster.mu, lambda, km, sm, kappa, kappa_prime)?;
                let upsi = um * &psi;
                let res = (0..psi.nrows())
                    .map(|i| (upsi[i] - lambda * psi[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                max_lift_residual = max_lift_residual.max(res);
                for i in 0..psi.nrows() {
                    cols[(i, j)] = psi[i];
                }
            }
            let basis = linalg::orthonormalize_columns(&cols, 1e-8);
            lift_rank_deficit += cluster.multiplicity - basis.ncols();
            vectors.push(basis);
        }
        lifted.push(LiftedEigen {
            pair,
            multiplicity: cluster.multiplicity,
            vectors,
        });
    }

    let null_tol = 10.0 * opts.tol_cluster;
    let residual_space = residual_eigenspace(km, sm, null_tol)?;
    let residual = ResidualCounts {
        plus_kp: residual_space.plus.ncols(),
        minus_kp: residual_space.minus.ncols(),
    };
    let m_plus = t_eigs.iter().filter(|c| c.mu == 1.0).map(|c| c.multiplicity).sum();
    let m_minus = t_eigs.iter().filter(|c| c.mu == -1.0).map(|c| c.multiplicity).sum();

    let sk = sm * km;
    let pv = km.ncols();
    let stacked = Mat::from_fn(km.nrows(), 2 * pv, |i, j| if j < pv { km[(i, j)] } else { sk[(i, j - pv)] });
    let dim_l = linalg::numerical_rank(&stacked, (2.0 * opts.tol_cluster).sqrt())?;
    let ledger = Ledger {
        m_plus,
        m_minus,
        dim_l,
        dim_l_perp: g.n_arcs() - dim_l.min(g.n_arcs()),
        dim_o_cap_t: 2 * pv - dim_l,
    };

    let exclusion_gap = if (kappa + kappa_prime).norm() > ANTIPODAL_TOL {
        Some(
            lifted
                .iter()
                .flat_map(|l| l.pair.lambdas.iter())
                .map(|&l| (l - kappa_prime).norm().min((l + kappa_prime).norm()))
                .fold(f64::INFINITY, f64::min),
        )
    } else {
        None
    };

    let dense = dense_spectrum(
        um,
        &DenseOptions {
            cap: opts.dense_cap,
            cluster_tol: opts.tol_cluster,
        },
    )?;
    let mut report = SpectrumReport {
        kappa,
        kappa_prime,
        p,
        n_vertices: g.n_vertices(),
        n_edges: g.n_edges(),
        t_eigs,
        lifted,
        residual,
        residual_space,
        ledger,
        oracle_delta: f64::INFINITY,
        max_lift_residual,
        lift_rank_deficit,
        exclusion_gap,
        coin_identity_residual,
        oracle_spectrum: dense.eigenvalues,
    };
    report.oracle_delta = circle_multiset_distance(&report.predicted_spectrum(), &report.oracle_spectrum);
    Ok(report)
}

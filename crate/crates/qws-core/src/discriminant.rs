//! Boundary operator `K`, arc weights and the discriminant `T = K*SK`.
//!
//! Columns of `K` are ordered vertex-major, basis-index minor: column
//! `u·p + i` is `α_u^(i)` placed on the arcs of `A_u`. Row `a` of `K` is
//! `w(a)*` on the block of `t(a)`, with `w(a)_i = conj(α_{t(a)}^(i)(a))`.

use faer::{Col, Mat};

use crate::coins::KernelBasis;
use crate::graph::Graph;
use crate::linalg::{self, ZERO};
use crate::walk::ShiftMatrix;
use crate::{c64, CMat, CVec, Error, Result};

/// Agreement required between `K*SK` and the arc-sum formula.
pub const BLOCK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    k: CMat,
    p: usize,
    n_vertices: usize,
}

impl BoundaryOperator {
    /// Wraps an arbitrary `|A| × p|V|` matrix without checking isometry.
    pub fn from_matrix(k: CMat, p: usize, n_vertices: usize) -> Result<Self> {
        if k.ncols() != p * n_vertices {
            return Err(Error::DimensionMismatch(format!(
                "K has {} columns, expected {}",
                k.ncols(),
                p * n_vertices
            )));
        }
        Ok(BoundaryOperator { k, p, n_vertices })
    }

    pub fn matrix(&self) -> &CMat {
        &self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// `w(a)` read back from row `a`.
    pub fn weight(&self, g: &Graph, a: usize) -> CVec {
        let base = g.terminus(a) * self.p;
        Col::from_fn(self.p, |i| self.k[(a, base + i)].conj())
    }

    /// `‖K*K − I‖_F`.
    pub fn isometry_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.k)
    }
}

/// `w(a)_i = conj(α_{t(a)}^(i)(a))`.
pub fn weight_vector(g: &Graph, cons: &KernelBasis, a: usize) -> CVec {
    let basis = cons.vertex(g.terminus(a));
    let row = g.local_index(a);
    Col::from_fn(cons.p(), |i| basis[(row, i)].conj())
}

/// `W(a) = w(a) w(ā)*`.
pub fn matrix_weight(g: &Graph, cons: &KernelBasis, a: usize) -> CMat {
    let w = weight_vector(g, cons, a);
    let wr = weight_vector(g, cons, g.inverse(a));
    Mat::from_fn(cons.p(), cons.p(), |i, j| w[i] * wr[j].conj())
}

pub fn build_boundary(g: &Graph, cons: &KernelBasis) -> Result<BoundaryOperator> {
    if cons.n_vertices() != g.n_vertices() {
        return Err(Error::DimensionMismatch("kernel basis does not match graph".into()));
    }
    let p = cons.p();
    let mut k = Mat::zeros(g.n_arcs(), p * g.n_vertices());
    for a in 0..g.n_arcs() {
        let u = g.terminus(a);
        let basis = cons.vertex(u);
        for i in 0..p {
            k[(a, u * p + i)] = basis[(g.local_index(a), i)];
        }
    }
    let boundary = BoundaryOperator {
        k,
        p,
        n_vertices: g.n_vertices(),
    };
    let residual = boundary.isometry_residual();
    if !(residual <= BLOCK_TOL) {
        return Err(Error::Consistency(format!("K*K deviates from I by {residual:.3e}")));
    }
    Ok(boundary)
}

/// The Hermitian discriminant with `p × p` blocks `(T)_{u,v}`.
#[derive(Debug, Clone)]
pub struct Discriminant {
    t: CMat,
    p: usize,
    n_vertices: usize,
}

impl Discriminant {
    /// Wraps a `p|V| × p|V|` matrix after a Hermitian check.
    pub fn from_matrix(t: CMat, p: usize, n_vertices: usize) -> Result<Self> {
        if t.nrows() != p * n_vertices || t.ncols() != p * n_vertices {
            return Err(Error::DimensionMismatch("discriminant shape".into()));
        }
        let herm = linalg::hermitian_residual(&t);
        if !(herm <= BLOCK_TOL) {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Discriminant { t, p, n_vertices })
    }

    pub fn matrix(&self) -> &CMat {
        &self.t
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn block(&self, u: usize, v: usize) -> CMat {
        let p = self.p;
        self.t.get(u * p..(u + 1) * p, v * p..(v + 1) * p).to_owned()
    }
}

fn require_reversal(s: &ShiftMatrix) -> Result<()> {
    if s.is_reversal() {
        Ok(())
    } else {
        Err(Error::UnsupportedShift(
            "discriminant needs a flip-flop or twisted shift; rewrite permutation shifts with to_flipflop_coin first".into(),
        ))
    }
}

/// `(T)_{u,v} = Σ_{t(a)=u, o(a)=v} e^{iθ(a)} W(a)`, summed arc by arc.
pub fn block_formula(g: &Graph, cons: &KernelBasis, s: &ShiftMatrix) -> Result<CMat> {
    require_reversal(s)?;
    let p = cons.p();
    let mut t = Mat::zeros(p * g.n_vertices(), p * g.n_vertices());
    for a in 0..g.n_arcs() {
        let (u, v) = (g.terminus(a), g.origin(a));
        let w = matrix_weight(g, cons, a);
        let phase = s.phase(a);
        for i in 0..p {
            for j in 0..p {
                t[(u * p + i, v * p + j)] += phase * w[(i, j)];
            }
        }
    }
    Ok(t)
}

/// `T = K*SK`, cross-checked against the arc-sum formula built from the rows of `K`.
pub fn build_discriminant(g: &Graph, k: &BoundaryOperator, s: &ShiftMatrix) -> Result<Discriminant> {
    require_reversal(s)?;
    if s.matrix().nrows() != k.matrix().nrows() || g.n_arcs() != k.matrix().nrows() {
        return Err(Error::DimensionMismatch(format!(
            "shift is {}x{}, K has {} rows",
            s.matrix().nrows(),
            s.matrix().ncols(),
            k.matrix().nrows()
        )));
    }
    let km = k.matrix();
    let t = km.adjoint() * (s.matrix() * km);
    let p = k.p();
    let mut blocks = Mat::<c64>::zeros(t.nrows(), t.ncols());
    for a in 0..g.n_arcs() {
        let (u, v) = (g.terminus(a), g.origin(a));
        let w = k.weight(g, a);
        let wr = k.weight(g, g.inverse(a));
        for i in 0..p {
            for j in 0..p {
                blocks[(u * p + i, v * p + j)] += s.phase(a) * w[i] * wr[j].conj();
            }
        }
    }
    let gap = linalg::distance(&t, &blocks);
    if !(gap <= BLOCK_TOL) {
        return Err(Error::Consistency(format!("K*SK and the block formula differ by {gap:.3e}")));
    }
    Discriminant::from_matrix(t, p, k.n_vertices())
}

/// `‖C − (κ − κ′) KK* − κ′ I‖_F`.
pub fn verify_coin_identity(k: &BoundaryOperator, c: &CMat, kappa: c64, kappa_prime: c64) -> f64 {
    let km = k.matrix();
    let proj = km * km.adjoint();
    let n = c.nrows();
    let rebuilt = Mat::from_fn(n, n, |i, j| {
        (kappa - kappa_prime) * proj[(i, j)] + if i == j { kappa_prime } else { ZERO }
    });
    linalg::distance(c, &rebuilt)
}

/// Compares `T^n` with the explicit sum over arc paths `a_1 … a_n`
/// (`t(a_i) = o(a_{i+1})`) of `W(a_n) ⋯ W(a_1)`, each weighted by its phases.
pub fn path_sum_check(g: &Graph, cons: &KernelBasis, s: &ShiftMatrix, n: usize) -> Result<f64> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidParameter("path length must be in 1..=4".into()));
    }
    let t = block_formula(g, cons, s)?;
    let mut power = t.clone();
    for _ in 1..n {
        power = &t * &power;
    }
    let p = cons.p();
    let weights: Vec<CMat> = (0..g.n_arcs())
        .map(|a| linalg::scaled(&matrix_weight(g, cons, a), s.phase(a)))
        .collect();
    let mut leaving = vec![Vec::new(); g.n_vertices()];
    for a in 0..g.n_arcs() {
        leaving[g.origin(a)].push(a);
    }
    let mut sum = Mat::<c64>::zeros(t.nrows(), t.ncols());
    let mut stack: Vec<(usize, usize, CMat, usize)> =
        (0..g.n_arcs()).map(|a| (g.origin(a), a, weights[a].clone(), 1)).collect();
    while let Some((start, last, product, len)) = stack.pop() {
        if len == n {
            let u = g.terminus(last);
            for i in 0..p {
                for j in 0..p {
                    sum[(u * p + i, start * p + j)] += product[(i, j)];
                }
            }
            continue;
        }
        for &next in &leaving[g.terminus(last)] {
            stack.push((start, next, &weights[next] * &product, len + 1));
        }
    }
    Ok(linalg::distance(&power, &sum))
}

/// Largest entry deviation of block-row sums `Σ_v (T)_{u,v}` and block-column
/// sums `Σ_u (T)_{u,v}` from `I_p`, returned as `(row, column)`.
pub fn stochastic_sums(t: &Discriminant) -> (f64, f64) {
    let (p, n) = (t.p(), t.n_vertices());
    let eye = linalg::identity(p);
    let mut row = 0.0f64;
    let mut col = 0.0f64;
    for fixed in 0..n {
        let mut r = Mat::<c64>::zeros(p, p);
        let mut c = Mat::<c64>::zeros(p, p);
        for other in 0..n {
            r += t.block(fixed, other);
            c += t.block(other, fixed);
        }
        row = row.max(linalg::max_abs(&(&r - &eye)));
        col = col.max(linalg::max_abs(&(&c - &eye)));
    }
    (row, col)
}

/// `‖Σ_u (Tf)(u) − Σ_u f(u)‖` for `f ∈ C^{p|V|}`.
pub fn conservation_residual(t: &Discriminant, f: &CVec) -> f64 {
    let tf = t.matrix() * f;
    let p = t.p();
    (0..p)
        .map(|i| {
            let lhs: c64 = (0..t.n_vertices()).map(|u| tf[u * p + i]).sum();
            let rhs: c64 = (0..t.n_vertices()).map(|u| f[u * p + i]).sum();
            (lhs - rhs).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

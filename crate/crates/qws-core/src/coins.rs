//! Local coins, the two-point-spectrum certificate and kernel bases.

use faer::Mat;
use rayon::prelude::*;

use crate::graph::{validate_shift_permutation, ArcPermutation, Graph};
use crate::linalg::{self, ONE, ZERO};
use crate::{c64, CMat, Error, Result};

/// Tolerance on `‖C_u*C_u − I‖_F` accepted for user-supplied coins.
pub const UNITARY_TOL: f64 = 1e-10;

/// Per-vertex coins together with the declared certificate `(κ, κ′, p)`.
///
/// The constructor checks shapes, unitarity and the ranges of `κ`, `κ′`, `p`.
/// Whether the spectra actually sit on `{κ, κ′}` is established separately by
/// [`certify_two_point_spectrum`].
#[derive(Debug, Clone)]
pub struct CoinAssignment {
    matrices: Vec<CMat>,
    kappa: c64,
    kappa_prime: c64,
    p: usize,
}

impl CoinAssignment {
    pub fn new(
        g: &Graph,
        matrices: Vec<CMat>,
        kappa: c64,
        kappa_prime: c64,
        p: usize,
    ) -> Result<Self> {
        if matrices.len() != g.n_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} coin matrices for {} vertices",
                matrices.len(),
                g.n_vertices()
            )));
        }
        for (u, m) in matrices.iter().enumerate() {
            let d = g.degree(u);
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "coin at vertex {u} is {}x{}, degree is {d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let residual = linalg::unitarity_residual(m);
            if !(residual <= UNITARY_TOL) {
                return Err(Error::NotUnitary { vertex: u, residual });
            }
        }
        let coins = CoinAssignment {
            matrices,
            kappa,
            kappa_prime,
            p,
        };
        coins.check_certificate(g.min_degree())?;
        Ok(coins)
    }

    fn check_certificate(&self, min_degree: usize) -> Result<()> {
        for (name, z) in [("kappa", self.kappa), ("kappa_prime", self.kappa_prime)] {
            if !((z.norm() - 1.0).abs() <= 1e-12) {
                return Err(Error::InvalidCertificate(format!("|{name}| = {} is not 1", z.norm())));
            }
        }
        if !((self.kappa - self.kappa_prime).norm() > crate::TOL_CLUSTER) {
            return Err(Error::InvalidCertificate("kappa equals kappa_prime".into()));
        }
        if self.p == 0 || self.p > min_degree {
            return Err(Error::InvalidCertificate(format!(
                "p = {} outside 1..={min_degree}",
                self.p
            )));
        }
        Ok(())
    }

    /// Grover coins with certificate `(1, −1, 1)`.
    pub fn grover(g: &Graph) -> Result<Self> {
        let matrices = (0..g.n_vertices())
            .map(|u| grover_matrix(g.degree(u)))
            .collect::<Result<_>>()?;
        Self::new(g, matrices, ONE, -ONE, 1)
    }

    /// The same matrix at every vertex.
    pub fn uniform(g: &Graph, matrix: &CMat, kappa: c64, kappa_prime: c64, p: usize) -> Result<Self> {
        Self::new(g, vec![matrix.clone(); g.n_vertices()], kappa, kappa_prime, p)
    }

    /// Same matrices, new declared certificate.
    pub fn with_certificate(self, g: &Graph, kappa: c64, kappa_prime: c64, p: usize) -> Result<Self> {
        Self::new(g, self.matrices, kappa, kappa_prime, p)
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, u: usize) -> &CMat {
        &self.matrices[u]
    }

    pub fn kappa(&self) -> c64 {
        self.kappa
    }

    pub fn kappa_prime(&self) -> c64 {
        self.kappa_prime
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_vertices(&self) -> usize {
        self.matrices.len()
    }
}

/// `(2/n) J − I`.
pub fn grover_matrix(n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::InvalidParameter("Grover matrix needs n >= 1".into()));
    }
    let w = 2.0 / n as f64;
    Ok(Mat::from_fn(n, n, |i, j| c64::new(if i == j { w - 1.0 } else { w }, 0.0)))
}

/// `σ · Gr(2d)` where `σ` swaps coordinates `2j` and `2j + 1` (zero-based).
pub fn moving_shift_coin(d: usize) -> Result<CMat> {
    if d == 0 {
        return Err(Error::InvalidParameter("lattice dimension must be positive".into()));
    }
    let n = 2 * d;
    let w = 2.0 / n as f64;
    Ok(Mat::from_fn(n, n, |i, j| c64::new(if i ^ 1 == j { w - 1.0 } else { w }, 0.0)))
}

/// Rewrites `(π, C)` as flip-flop coins `C′_u = Q_u(π) C_u`, where
/// `Q_u(π) δ_a = δ_{π(a)⁻¹}` inside `A_u`. The certificate is carried over
/// unchanged; callers re-declare it with [`CoinAssignment::with_certificate`]
/// when the local spectra move.
pub fn to_flipflop_coin(g: &Graph, pi: &ArcPermutation, coins: &CoinAssignment) -> Result<CoinAssignment> {
    validate_shift_permutation(g, pi)?;
    let matrices = (0..g.n_vertices())
        .map(|u| {
            let c = coins.matrix(u);
            let d = g.degree(u);
            let mut out = Mat::zeros(d, d);
            for &a in g.incoming(u) {
                let src = g.local_index(a);
                let dst = g.local_index(g.inverse(pi.apply(a)));
                for j in 0..d {
                    out[(dst, j)] = c[(src, j)];
                }
            }
            out
        })
        .collect();
    Ok(CoinAssignment {
        matrices,
        ..coins.clone()
    })
}

/// Kernel dimensions at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelDims {
    pub kappa: usize,
    pub kappa_prime: usize,
}

/// Checks that every local spectrum lies on `{κ, κ′}` with `dim ker(κ − C_u) = p`.
pub fn certify_two_point_spectrum(coins: &CoinAssignment, tol: f64) -> Result<Vec<KernelDims>> {
    coins
        .matrices
        .par_iter()
        .enumerate()
        .map(|(u, c)| {
            let (values, _) = linalg::general_eigen(c)?;
            let mut dims = KernelDims { kappa: 0, kappa_prime: 0 };
            for z in values {
                if (z - coins.kappa).norm() <= tol {
                    dims.kappa += 1;
                } else if (z - coins.kappa_prime).norm() <= tol {
                    dims.kappa_prime += 1;
                } else {
                    return Err(Error::SpectrumViolation { vertex: u, re: z.re, im: z.im });
                }
            }
            if dims.kappa != coins.p {
                return Err(Error::MultiplicityViolation {
                    vertex: u,
                    found: dims.kappa,
                    expected: coins.p,
                });
            }
            Ok(dims)
        })
        .collect()
}

/// Orthonormal bases of `ker(κ − C_u)`, stored as `d(u) × p` matrices.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    vectors: Vec<CMat>,
    p: usize,
}

impl KernelBasis {
    /// Validates user-chosen bases: orthonormal columns in `ker(κ − C_u)`.
    pub fn from_columns(coins: &CoinAssignment, vectors: Vec<CMat>, tol: f64) -> Result<Self> {
        if vectors.len() != coins.n_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} kernel bases for {} vertices",
                vectors.len(),
                coins.n_vertices()
            )));
        }
        for (u, v) in vectors.iter().enumerate() {
            let c = coins.matrix(u);
            if v.nrows() != c.nrows() || v.ncols() != coins.p {
                return Err(Error::InvalidKernelBasis {
                    vertex: u,
                    reason: format!("shape {}x{}, expected {}x{}", v.nrows(), v.ncols(), c.nrows(), coins.p),
                });
            }
            let orth = linalg::unitarity_residual(v);
            if !(orth <= tol) {
                return Err(Error::InvalidKernelBasis {
                    vertex: u,
                    reason: format!("columns not orthonormal (residual {orth:.3e})"),
                });
            }
            let image = c * v;
            let eig = linalg::distance(&image, &linalg::scaled(v, coins.kappa));
            if !(eig <= tol) {
                return Err(Error::InvalidKernelBasis {
                    vertex: u,
                    reason: format!("columns not in ker(kappa - C_u) (residual {eig:.3e})"),
                });
            }
        }
        Ok(KernelBasis { vectors, p: coins.p })
    }

    /// `α_u^(1..p)` as columns.
    pub fn vertex(&self, u: usize) -> &CMat {
        &self.vectors[u]
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_vertices(&self) -> usize {
        self.vectors.len()
    }
}

/// Deterministic CONS of every `ker(κ − C_u)`.
///
/// The κ-eigenprojector `P = (C_u − κ′)/(κ − κ′)` is reduced by Gram–Schmidt
/// with largest-residual column pivoting. The resulting vectors are sorted by
/// pivot column and each is rotated so that its first component of modulus
/// above `1e-9` is real and positive. The output depends only on the
/// eigenspace, not on how an eigensolver happened to split it.
pub fn kernel_cons(coins: &CoinAssignment, tol: f64) -> Result<KernelBasis> {
    certify_two_point_spectrum(coins, tol)?;
    let vectors = coins
        .matrices
        .par_iter()
        .map(|c| pivoted_projector_basis(c, coins.kappa, coins.kappa_prime, coins.p))
        .collect();
    KernelBasis::from_columns(coins, vectors, tol.max(1e-10))
}

fn pivoted_projector_basis(c: &CMat, kappa: c64, kappa_prime: c64, p: usize) -> CMat {
    let d = c.nrows();
    let denom = kappa - kappa_prime;
    let proj = Mat::from_fn(d, d, |i, j| {
        let shift = if i == j { kappa_prime } else { ZERO };
        (c[(i, j)] - shift) / denom
    });
    let mut resid = linalg::hermitian_part(&proj);
    let mut chosen: Vec<(usize, Vec<c64>)> = Vec::with_capacity(p);
    for _ in 0..p {
        let col_norm = |j: usize| (0..d).map(|i| resid[(i, j)].norm_sqr()).sum::<f64>();
        let mut pivot = 0;
        let mut best = -1.0;
        for j in 0..d {
            let n = col_norm(j);
            if n > best * (1.0 + 1e-12) {
                best = n;
                pivot = j;
            }
        }
        let mut v: Vec<c64> = (0..d).map(|i| resid[(i, pivot)]).collect();
        for _ in 0..2 {
            for (_, b) in &chosen {
                let proj: c64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= nrm;
        }
        for j in 0..d {
            let overlap: c64 = (0..d).map(|i| v[i].conj() * resid[(i, j)]).sum();
            for i in 0..d {
                resid[(i, j)] -= v[i] * overlap;
            }
        }
        chosen.push((pivot, v));
    }
    chosen.sort_by_key(|(pivot, _)| *pivot);
    for (_, v) in &mut chosen {
        if let Some(lead) = v.iter().find(|z| z.norm() > 1e-9).copied() {
            let phase = lead.conj() / lead.norm();
            for z in v.iter_mut() {
                *z *= phase;
            }
        }
    }
    Mat::from_fn(d, p, |i, j| chosen[j].1[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TorusLayout;
    use crate::walk::{coin_matrix, shift_matrix, Shift};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn eigen_clusters(m: &CMat) -> (usize, usize, f64) {
        let (values, _) = linalg::general_eigen(m).unwrap();
        let plus: Vec<_> = values.iter().filter(|z| (**z - ONE).norm() < 1e-8).collect();
        let minus: Vec<_> = values.iter().filter(|z| (**z + ONE).norm() < 1e-8).collect();
        let diam = |v: &[&c64]| {
            v.iter()
                .flat_map(|a| v.iter().map(move |b| (**a - **b).norm()))
                .fold(0.0, f64::max)
        };
        (plus.len(), minus.len(), diam(&plus).max(diam(&minus)))
    }

    #[test]
    fn grover_small_cases() {
        let g2 = grover_matrix(2).unwrap();
        assert_eq!(g2[(0, 1)], ONE);
        assert_eq!(g2[(0, 0)], ZERO);
        let g4 = grover_matrix(4).unwrap();
        assert_eq!(g4[(0, 0)].re, -0.5);
        assert_eq!(g4[(1, 3)].re, 0.5);
        assert_eq!(eigen_clusters(&grover_matrix(6).unwrap()).0, 1);
        assert_eq!(eigen_clusters(&grover_matrix(6).unwrap()).1, 5);
        assert!(grover_matrix(0).is_err());
    }

    #[test]
    fn moving_shift_coin_cases() {
        let c1 = moving_shift_coin(1).unwrap();
        assert!(linalg::distance(&c1, &linalg::identity(2)) < 1e-15);
        for d in 1..=6 {
            let (plus, minus, diam) = eigen_clusters(&moving_shift_coin(d).unwrap());
            assert_eq!((plus, minus), (d + 1, d - 1));
            assert!(diam <= 1e-10);
        }
    }

    #[test]
    fn flipflop_leaves_coins_unchanged() {
        let g = Graph::complete(4).unwrap();
        let coins = CoinAssignment::grover(&g).unwrap();
        let out = to_flipflop_coin(&g, &ArcPermutation::flip_flop(&g), &coins).unwrap();
        for u in 0..4 {
            assert_eq!(linalg::distance(out.matrix(u), coins.matrix(u)), 0.0);
        }
    }

    #[test]
    fn torus_moving_shift_rewrites_to_sigma_grover() {
        let (d, n) = (3, 3);
        let g = Graph::hypercubic_torus(d, n).unwrap();
        let coins = CoinAssignment::grover(&g).unwrap();
        let pi = ArcPermutation::moving_shift(d, n).unwrap();
        let out = to_flipflop_coin(&g, &pi, &coins).unwrap();
        let target = moving_shift_coin(d).unwrap();
        let layout = TorusLayout { dim: d, size: n };
        for x in 0..layout.n_vertices().unwrap() {
            assert!(linalg::distance(out.matrix(x), &target) < 1e-15);
        }
    }

    #[test]
    fn certificate_cases() {
        let g = Graph::complete(4).unwrap();
        let dims = certify_two_point_spectrum(&CoinAssignment::grover(&g).unwrap(), 1e-8).unwrap();
        assert!(dims.iter().all(|k| *k == KernelDims { kappa: 1, kappa_prime: 2 }));

        let b = Graph::bouquet(3).unwrap();
        let coins = CoinAssignment::uniform(&b, &moving_shift_coin(3).unwrap(), -ONE, ONE, 2).unwrap();
        let dims = certify_two_point_spectrum(&coins, 1e-8).unwrap();
        assert_eq!(dims, vec![KernelDims { kappa: 2, kappa_prime: 4 }]);

        let one_edge = Graph::from_edges(2, &[(0, 0), (1, 1)]).unwrap();
        let bad = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64::new(0.0, 1.0),
            (1, 1) => ONE,
            _ => ZERO,
        });
        let coins = CoinAssignment::uniform(&one_edge, &bad, ONE, -ONE, 1).unwrap();
        assert!(matches!(
            certify_two_point_spectrum(&coins, 1e-8),
            Err(Error::SpectrumViolation { vertex: 0, .. })
        ));
        let coins = CoinAssignment::uniform(&b, &moving_shift_coin(3).unwrap(), -ONE, ONE, 1).unwrap();
        assert!(matches!(
            certify_two_point_spectrum(&coins, 1e-8),
            Err(Error::MultiplicityViolation { found: 2, expected: 1, .. })
        ));
    }

    #[test]
    fn certificate_ranges_rejected() {
        let g = Graph::cycle(4).unwrap();
        let c = grover_matrix(2).unwrap();
        assert!(CoinAssignment::uniform(&g, &c, ONE, ONE, 1).is_err());
        assert!(CoinAssignment::uniform(&g, &c, ONE, -ONE, 3).is_err());
        assert!(CoinAssignment::uniform(&g, &c, c64::new(2.0, 0.0), -ONE, 1).is_err());
        let nonunitary = Mat::from_fn(2, 2, |_, _| ONE);
        assert!(matches!(
            CoinAssignment::uniform(&g, &nonunitary, ONE, -ONE, 1),
            Err(Error::NotUnitary { .. })
        ));
    }

    /// `P_S = V V*` for a basis `V`.
    fn projector(v: &CMat) -> CMat {
        v * v.adjoint()
    }

    #[test]
    fn cons_spans_lattice_bases() {
        let b = Graph::bouquet(3).unwrap();
        let c = moving_shift_coin(3).unwrap();
        let omega = c64::from_polar(1.0, 2.0 * PI / 3.0);
        let case_i = Mat::from_fn(6, 2, |i, j| omega.powu(((j + 1) * (i / 2)) as u32) / 6f64.sqrt());
        let coins = CoinAssignment::uniform(&b, &c, -ONE, ONE, 2).unwrap();
        let cons = kernel_cons(&coins, 1e-8).unwrap();
        assert!(linalg::distance(&projector(cons.vertex(0)), &projector(&case_i)) < 1e-12);

        let case_ii = Mat::from_fn(6, 4, |i, j| {
            if j == 0 {
                c64::new(1.0 / 6f64.sqrt(), 0.0)
            } else if i / 2 == j - 1 {
                c64::new(if i % 2 == 0 { 1.0 } else { -1.0 } / 2f64.sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        let coins = CoinAssignment::uniform(&b, &c, ONE, -ONE, 4).unwrap();
        let cons = kernel_cons(&coins, 1e-8).unwrap();
        assert!(linalg::distance(&projector(cons.vertex(0)), &projector(&case_ii)) < 1e-12);
    }

    #[test]
    fn grover_cons_is_uniform() {
        let g = Graph::complete(4).unwrap();
        let cons = kernel_cons(&CoinAssignment::grover(&g).unwrap(), 1e-8).unwrap();
        for u in 0..4 {
            for i in 0..3 {
                assert!((cons.vertex(u)[(i, 0)] - c64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cons_rejects_wrong_basis() {
        let b = Graph::bouquet(2).unwrap();
        let coins = CoinAssignment::uniform(&b, &moving_shift_coin(2).unwrap(), -ONE, ONE, 1).unwrap();
        let wrong = Mat::from_fn(4, 1, |_, _| c64::new(0.5, 0.0));
        assert!(KernelBasis::from_columns(&coins, vec![wrong], 1e-10).is_err());
    }

    fn random_unitary_strategy(n: usize) -> impl Strategy<Value = CMat> {
        prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |xs| {
            let m = Mat::from_fn(n, n, |i, j| c64::new(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1]));
            m.qr().compute_Q()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn random_permutation_rewrite_on_cycle(
            swaps in prop::collection::vec(any::<bool>(), 4),
            coins in prop::collection::vec(random_unitary_strategy(2), 4),
        ) {
            // On C_4 each vertex has two incoming arcs; a valid π picks, per vertex,
            // which outgoing arc receives each incoming one.
            let g = Graph::cycle(4).unwrap();
            let mut perm = vec![0; 8];
            for (u, &swap) in swaps.iter().enumerate() {
                let inc = g.incoming(u);
                let out: Vec<usize> = (0..8).filter(|&b| g.origin(b) == u).collect();
                let (o0, o1) = if swap { (out[1], out[0]) } else { (out[0], out[1]) };
                perm[inc[0]] = o0;
                perm[inc[1]] = o1;
            }
            let pi = ArcPermutation::new(perm);
            let assignment = CoinAssignment::new(&g, coins, ONE, -ONE, 1).unwrap();
            let rewritten = to_flipflop_coin(&g, &pi, &assignment).unwrap();
            let lhs = shift_matrix(&g, &Shift::Permutation(pi)).unwrap().matrix() * coin_matrix(&g, &assignment).unwrap();
            let rhs = shift_matrix(&g, &Shift::FlipFlop).unwrap().matrix() * coin_matrix(&g, &rewritten).unwrap();
            prop_assert!(linalg::distance(&lhs, &rhs) <= 1e-12);
        }

        #[test]
        fn cons_invariants_for_random_two_point_coins(
            q in random_unitary_strategy(5),
            p in 1usize..5,
            phase in 0.0f64..std::f64::consts::TAU,
            gap in 0.1f64..6.0,
        ) {
            let kappa = c64::from_polar(1.0, phase);
            let kappa_prime = c64::from_polar(1.0, phase + gap);
            let diag = Mat::from_fn(5, 5, |i, j| if i != j { ZERO } else if i < p { kappa } else { kappa_prime });
            let c = &q * &diag * q.adjoint();
            let g = Graph::from_edges(2, &[(0, 0), (0, 0), (0, 1), (1, 1), (1, 1)]).unwrap();
            let coins = CoinAssignment::uniform(&g, &c, kappa, kappa_prime, p).unwrap();
            let cons = kernel_cons(&coins, 1e-8).unwrap();
            for u in 0..2 {
                let v = cons.vertex(u);
                prop_assert!(linalg::unitarity_residual(v) <= 1e-10);
                let r = linalg::distance(&(&c * v), &linalg::scaled(v, kappa));
                prop_assert!(r <= 1e-10);
            }
        }
    }
}

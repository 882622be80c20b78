//! Shift, coin and evolution matrices on the arc space `C^A`, and the dense
//! eigendecomposition oracle.

use std::f64::consts::PI;

use faer::Mat;

use crate::coins::CoinAssignment;
use crate::graph::{validate_shift_permutation, ArcPermutation, Graph};
use crate::linalg::{self, ONE};
use crate::{c64, CMat, Error, Result};

/// Arc phases `θ` with `θ(ā) = −θ(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    theta: Vec<f64>,
}

impl OneForm {
    pub fn new(g: &Graph, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != g.n_arcs() {
            return Err(Error::DimensionMismatch(format!(
                "one-form has {} values, graph has {} arcs",
                theta.len(),
                g.n_arcs()
            )));
        }
        for a in 0..g.n_arcs() {
            if !((theta[a] + theta[g.inverse(a)]).abs() <= 1e-12) {
                return Err(Error::NotAntisymmetric { arc: a });
            }
        }
        Ok(OneForm { theta })
    }

    pub fn zero(g: &Graph) -> Self {
        OneForm {
            theta: vec![0.0; g.n_arcs()],
        }
    }

    pub fn value(&self, a: usize) -> f64 {
        self.theta[a]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }
}

/// Shift operator selection.
#[derive(Debug, Clone)]
pub enum Shift {
    FlipFlop,
    Permutation(ArcPermutation),
    Twisted(OneForm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftTag {
    FlipFlop,
    GeneralPermutation,
    Twisted,
}

/// A shift operator together with its per-arc phases.
///
/// For flip-flop and twisted shifts, `(Sψ)(a) = e^{iθ(a)} ψ(ā)`, so the only
/// nonzero entry of row `a` is `e^{iθ(a)}` in column `ā`.
#[derive(Debug, Clone)]
pub struct ShiftMatrix {
    matrix: CMat,
    tag: ShiftTag,
    phases: Vec<c64>,
}

impl ShiftMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn tag(&self) -> ShiftTag {
        self.tag
    }

    /// `e^{iθ(a)}`; `1` for flip-flop. Meaningless for a general permutation.
    pub fn phase(&self, a: usize) -> c64 {
        self.phases[a]
    }

    /// True when the shift has the form `ψ(a) ↦ e^{iθ(a)} ψ(ā)`.
    pub fn is_reversal(&self) -> bool {
        self.tag != ShiftTag::GeneralPermutation
    }
}

pub fn shift_matrix(g: &Graph, shift: &Shift) -> Result<ShiftMatrix> {
    let n = g.n_arcs();
    let mut matrix = Mat::zeros(n, n);
    match shift {
        Shift::Permutation(pi) => {
            validate_shift_permutation(g, pi)?;
            for a in 0..n {
                matrix[(pi.apply(a), a)] = ONE;
            }
            let flip = (0..n).all(|a| pi.apply(a) == g.inverse(a));
            let tag = if flip { ShiftTag::FlipFlop } else { ShiftTag::GeneralPermutation };
            Ok(ShiftMatrix {
                matrix,
                tag,
                phases: vec![ONE; n],
            })
        }
        Shift::FlipFlop => {
            for a in 0..n {
                matrix[(g.inverse(a), a)] = ONE;
            }
            Ok(ShiftMatrix {
                matrix,
                tag: ShiftTag::FlipFlop,
                phases: vec![ONE; n],
            })
        }
        Shift::Twisted(theta) => {
            if theta.as_slice().len() != n {
                return Err(Error::DimensionMismatch("one-form length differs from arc count".into()));
            }
            let phases: Vec<c64> = (0..n).map(|a| c64::from_polar(1.0, theta.value(a))).collect();
            for a in 0..n {
                matrix[(a, g.inverse(a))] = phases[a];
            }
            Ok(ShiftMatrix {
                matrix,
                tag: ShiftTag::Twisted,
                phases,
            })
        }
    }
}

/// Block-diagonal coin `C = ⊕_u C_u` on `C^A`.
pub fn coin_matrix(g: &Graph, coins: &CoinAssignment) -> Result<CMat> {
    if coins.n_vertices() != g.n_vertices() {
        return Err(Error::DimensionMismatch("coin count differs from vertex count".into()));
    }
    let n = g.n_arcs();
    let mut c = Mat::zeros(n, n);
    for u in 0..g.n_vertices() {
        let local = coins.matrix(u);
        let inc = g.incoming(u);
        if local.nrows() != inc.len() {
            return Err(Error::DimensionMismatch(format!("coin size mismatch at vertex {u}")));
        }
        for (i, &a) in inc.iter().enumerate() {
            for (j, &b) in inc.iter().enumerate() {
                c[(a, b)] = local[(i, j)];
            }
        }
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct EvolutionMatrix {
    matrix: CMat,
    tag: ShiftTag,
}

impl EvolutionMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn shift_tag(&self) -> ShiftTag {
        self.tag
    }
}

/// `U = S C`.
pub fn evolution(s: &ShiftMatrix, c: &CMat) -> Result<EvolutionMatrix> {
    if s.matrix.ncols() != c.nrows() || c.nrows() != c.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "shift is {}x{}, coin is {}x{}",
            s.matrix.nrows(),
            s.matrix.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    let matrix = &s.matrix * c;
    let residual = linalg::unitarity_residual(&matrix);
    if !(residual <= 1e-9) {
        return Err(Error::Consistency(format!("evolution not unitary (residual {residual:.3e})")));
    }
    Ok(EvolutionMatrix { matrix, tag: s.tag })
}

#[derive(Debug, Clone, Copy)]
pub struct DenseOptions {
    pub cap: usize,
    pub cluster_tol: f64,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions {
            cap: 4096,
            cluster_tol: crate::TOL_CLUSTER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Normalized mean of the member eigenvalues.
    pub value: c64,
    pub multiplicity: usize,
    /// Largest chord between members.
    pub diameter: f64,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMat,
}

#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub eigenvalues: Vec<c64>,
    pub clusters: Vec<EigenCluster>,
}

/// Full eigendecomposition of a unitary matrix, clustered on the unit circle.
pub fn dense_spectrum(u: &CMat, opts: &DenseOptions) -> Result<DenseSpectrum> {
    let n = u.nrows();
    if n > opts.cap {
        return Err(Error::CapExceeded { size: n, cap: opts.cap });
    }
    let (values, vectors) = linalg::general_eigen(u)?;
    let groups = cluster_on_circle(&values, opts.cluster_tol);
    let clusters = groups
        .into_iter()
        .map(|members| {
            let mean: c64 = members.iter().map(|&i| values[i]).sum();
            let value = if mean.norm() > 0.0 { mean / mean.norm() } else { values[members[0]] };
            let diameter = members
                .iter()
                .flat_map(|&i| members.iter().map(move |&j| (i, j)))
                .map(|(i, j)| (values[i] - values[j]).norm())
                .fold(0.0, f64::max);
            let raw = Mat::from_fn(n, members.len(), |r, c| vectors[(r, members[c])]);
            let mut basis = linalg::orthonormalize_columns(&raw, 1e-6);
            if basis.ncols() < members.len() {
                let shifted = Mat::from_fn(n, n, |r, c| u[(r, c)] - if r == c { value } else { linalg::ZERO });
                let gram = shifted.adjoint() * &shifted;
                let (_, evecs) = linalg::hermitian_eigen(&gram)?;
                basis = evecs.get(.., 0..members.len()).to_owned();
            }
            Ok(EigenCluster {
                value,
                multiplicity: members.len(),
                diameter,
                vectors: basis,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DenseSpectrum {
        eigenvalues: values,
        clusters,
    })
}

/// Greedy clustering by angle: consecutive sorted angles closer than `tol`
/// share a cluster, including across the branch cut.
pub fn cluster_on_circle(values: &[c64], tol: f64) -> Vec<Vec<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let angle = |z: c64| z.arg().rem_euclid(2.0 * PI);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| angle(values[a]).total_cmp(&angle(values[b])));
    let mut groups: Vec<Vec<usize>> = vec![vec![order[0]]];
    for w in order.windows(2) {
        if angle(values[w[1]]) - angle(values[w[0]]) <= tol {
            groups.last_mut().unwrap().push(w[1]);
        } else {
            groups.push(vec![w[1]]);
        }
    }
    if groups.len() > 1 {
        let first = angle(values[order[0]]);
        let last = angle(values[*order.last().unwrap()]);
        if first + 2.0 * PI - last <= tol {
            let tail = groups.pop().unwrap();
            groups[0].splice(0..0, tail);
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{grover_matrix, moving_shift_coin};
    use proptest::prelude::*;

    #[test]
    fn single_edge_flip_flop() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let s = shift_matrix(&g, &Shift::FlipFlop).unwrap();
        assert_eq!(s.matrix()[(0, 1)], ONE);
        assert_eq!(s.matrix()[(1, 0)], ONE);
        assert_eq!(s.matrix()[(0, 0)], linalg::ZERO);
    }

    #[test]
    fn zero_twist_is_flip_flop() {
        let g = Graph::complete(4).unwrap();
        let t = shift_matrix(&g, &Shift::Twisted(OneForm::zero(&g))).unwrap();
        let f = shift_matrix(&g, &Shift::FlipFlop).unwrap();
        assert_eq!(linalg::distance(t.matrix(), f.matrix()), 0.0);
    }

    #[test]
    fn twisted_row_convention() {
        let g = Graph::bouquet(1).unwrap();
        let theta = OneForm::new(&g, vec![0.3, -0.3]).unwrap();
        let s = shift_matrix(&g, &Shift::Twisted(theta)).unwrap();
        assert!((s.matrix()[(0, 1)] - c64::from_polar(1.0, 0.3)).norm() < 1e-15);
        assert!((s.matrix()[(1, 0)] - c64::from_polar(1.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn antisymmetry_enforced() {
        let g = Graph::bouquet(1).unwrap();
        assert!(matches!(OneForm::new(&g, vec![0.3, 0.3]), Err(Error::NotAntisymmetric { arc: 0 })));
    }

    #[test]
    fn cycle_grover_coin_blocks() {
        let g = Graph::cycle(4).unwrap();
        let c = coin_matrix(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        for u in 0..4 {
            let inc = g.incoming(u);
            assert_eq!(c[(inc[0], inc[1])], ONE);
            assert_eq!(c[(inc[0], inc[0])], linalg::ZERO);
        }
        assert!(linalg::unitarity_residual(&c) < 1e-14);
    }

    #[test]
    fn identity_coin_gives_shift() {
        let g = Graph::cycle(5).unwrap();
        let s = shift_matrix(&g, &Shift::FlipFlop).unwrap();
        let u = evolution(&s, &linalg::identity(10)).unwrap();
        assert_eq!(linalg::distance(u.matrix(), s.matrix()), 0.0);
    }

    #[test]
    fn complete_graph_grover_entries() {
        let g = Graph::complete(4).unwrap();
        let s = shift_matrix(&g, &Shift::FlipFlop).unwrap();
        let c = coin_matrix(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        let u = evolution(&s, &c).unwrap();
        // U_{ef} = 2/d(t(f)) − [f = ē] when t(f) = o(e), zero otherwise.
        for e in 0..12 {
            for f in 0..12 {
                let expected = if g.terminus(f) == g.origin(e) {
                    2.0 / 3.0 - if f == g.inverse(e) { 1.0 } else { 0.0 }
                } else {
                    0.0
                };
                assert!((u.matrix()[(e, f)] - c64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
        let spec = dense_spectrum(u.matrix(), &DenseOptions::default()).unwrap();
        let total: usize = spec.clusters.iter().map(|c| c.multiplicity).sum();
        assert_eq!(total, 12);
        assert!(linalg::unitarity_residual(u.matrix()) <= 1e-12);
    }

    #[test]
    fn complete_graph_grover_coin_spectrum() {
        let g = Graph::complete(4).unwrap();
        let c = coin_matrix(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        let spec = dense_spectrum(&c, &DenseOptions::default()).unwrap();
        assert!(spec
            .eigenvalues
            .iter()
            .all(|z| (*z - ONE).norm() < 1e-10 || (*z + ONE).norm() < 1e-10));
    }

    #[test]
    fn cycle_grover_eighth_power() {
        // The Grover walk on C_4 is the permutation of arcs that keeps direction,
        // so U^4 = I and every eigenvalue is a fourth root of unity.
        let g = Graph::cycle(4).unwrap();
        let s = shift_matrix(&g, &Shift::FlipFlop).unwrap();
        let c = coin_matrix(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        let u = evolution(&s, &c).unwrap();
        let mut power = linalg::identity(8);
        for _ in 0..8 {
            power = u.matrix() * &power;
        }
        let spec = dense_spectrum(&power, &DenseOptions::default()).unwrap();
        assert_eq!(spec.clusters.len(), 1);
        assert_eq!(spec.clusters[0].multiplicity, 8);
        assert!((spec.clusters[0].value - ONE).norm() < 1e-10);
    }

    #[test]
    fn oracle_self_checks() {
        let spec = dense_spectrum(&linalg::identity(7), &DenseOptions::default()).unwrap();
        assert_eq!(spec.clusters.len(), 1);
        assert_eq!(spec.clusters[0].multiplicity, 7);

        let spec = dense_spectrum(&grover_matrix(6).unwrap(), &DenseOptions::default()).unwrap();
        let mut mults: Vec<(i64, usize)> = spec
            .clusters
            .iter()
            .map(|c| (c.value.re.round() as i64, c.multiplicity))
            .collect();
        mults.sort();
        assert_eq!(mults, vec![(-1, 5), (1, 1)]);
        for c in &spec.clusters {
            assert!(linalg::unitarity_residual(&c.vectors) < 1e-12);
        }
    }

    #[test]
    fn cap_enforced() {
        let opts = DenseOptions { cap: 4, ..Default::default() };
        assert!(matches!(
            dense_spectrum(&linalg::identity(5), &opts),
            Err(Error::CapExceeded { size: 5, cap: 4 })
        ));
    }

    #[test]
    fn clustering_wraps_branch_cut() {
        let vals = [c64::from_polar(1.0, -1e-10), c64::from_polar(1.0, 1e-10), c64::from_polar(1.0, 2.0)];
        let groups = cluster_on_circle(&vals, 1e-8);
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().any(|g| g.len() == 2));
    }

    #[test]
    fn bouquet_moving_coin_single_block() {
        let g = Graph::bouquet(3).unwrap();
        let coins = CoinAssignment::uniform(&g, &moving_shift_coin(3).unwrap(), ONE, -ONE, 4).unwrap();
        let c = coin_matrix(&g, &coins).unwrap();
        assert_eq!(linalg::distance(&c, &moving_shift_coin(3).unwrap()), 0.0);
    }

    proptest! {
        #[test]
        fn twisted_shift_is_unitary_involution(
            phases in prop::collection::vec(-PI..PI, 6),
        ) {
            let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0), (0, 0), (1, 1), (0, 2)]).unwrap();
            let theta: Vec<f64> = phases.iter().flat_map(|&t| [t, -t]).collect();
            let s = shift_matrix(&g, &Shift::Twisted(OneForm::new(&g, theta).unwrap())).unwrap();
            prop_assert!(linalg::unitarity_residual(s.matrix()) <= 1e-12);
            let sq = s.matrix() * s.matrix();
            prop_assert!(linalg::distance(&sq, &linalg::identity(12)) <= 1e-12);
        }
    }
}

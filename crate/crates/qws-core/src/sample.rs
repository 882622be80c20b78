//! Seeded random instances for property tests and the verification suite.

use std::f64::consts::PI;

use faer::Mat;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coins::{grover_matrix, to_flipflop_coin, CoinAssignment};
use crate::graph::{ArcPermutation, Graph};
use crate::linalg::{self, ONE};
use crate::walk::{OneForm, Shift};
use crate::{c64, CMat, Error, Result};

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub coins: CoinAssignment,
    pub shift: Shift,
}

impl Instance {
    /// Coins and shift after rewriting a permutation shift in flip-flop form.
    pub fn flip_flop_form(&self) -> Result<(CoinAssignment, Shift)> {
        match &self.shift {
            Shift::Permutation(pi) => Ok((to_flipflop_coin(&self.graph, pi, &self.coins)?, Shift::FlipFlop)),
            other => Ok((self.coins.clone(), other.clone())),
        }
    }
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    Mat::from_fn(rows, cols, |_, _| {
        c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-like unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    loop {
        let q = linalg::orthonormalize_columns(&gaussian_matrix(rng, n, n), 1e-8);
        if q.ncols() == n {
            return q;
        }
    }
}

fn random_phase(rng: &mut impl Rng) -> c64 {
    c64::from_polar(1.0, rng.gen_range(-PI..PI))
}

/// Distinct unit-modulus pair `(κ, κ′)` with `|κ − κ′| ≥ 0.2`.
pub fn random_certificate_pair(rng: &mut impl Rng) -> (c64, c64) {
    let kappa = random_phase(rng);
    loop {
        let kappa_prime = random_phase(rng);
        if (kappa - kappa_prime).norm() >= 0.2 {
            return (kappa, kappa_prime);
        }
    }
}

/// `(κ − κ′) QQ* + κ′ I` for a random `n × p` isometry `Q`.
pub fn random_two_point_coin(rng: &mut impl Rng, n: usize, p: usize, kappa: c64, kappa_prime: c64) -> CMat {
    let q = random_unitary(rng, n);
    let q = q.get(.., 0..p).to_owned();
    let proj = &q * q.adjoint();
    Mat::from_fn(n, n, |i, j| {
        (kappa - kappa_prime) * proj[(i, j)] + if i == j { kappa_prime } else { linalg::ZERO }
    })
}

pub fn random_two_point_coins(rng: &mut impl Rng, g: &Graph) -> Result<CoinAssignment> {
    let (kappa, kappa_prime) = random_certificate_pair(rng);
    let p = rng.gen_range(1..=g.min_degree());
    let matrices = (0..g.n_vertices())
        .map(|u| random_two_point_coin(rng, g.degree(u), p, kappa, kappa_prime))
        .collect();
    CoinAssignment::new(g, matrices, kappa, kappa_prime, p)
}

/// `count` points on `|λ| = radius` drawn from a generator seeded with `seed`.
pub fn seeded_circle_samples(seed: u64, count: usize, radius: f64) -> Vec<c64> {
    crate::spectral::circle_samples(&mut ChaCha8Rng::seed_from_u64(seed), count, radius)
}

/// Random spanning tree on `n` vertices plus `extra` random edges, which may
/// repeat or be loops.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter("random graph needs n >= 2".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    Graph::from_edges(n, &edges)
}

pub fn random_one_form(rng: &mut impl Rng, g: &Graph) -> Result<OneForm> {
    let mut theta = vec![0.0; g.n_arcs()];
    for e in 0..g.n_edges() {
        let t = rng.gen_range(-PI..PI);
        theta[2 * e] = t;
        theta[2 * e + 1] = -t;
    }
    OneForm::new(g, theta)
}

/// Uniformly random arc permutation with `o(π(a)) = t(a)`.
pub fn random_shift_permutation(rng: &mut impl Rng, g: &Graph) -> ArcPermutation {
    let mut perm = vec![0; g.n_arcs()];
    for u in 0..g.n_vertices() {
        let incoming = g.incoming(u);
        let mut outgoing: Vec<usize> = incoming.iter().map(|&a| g.inverse(a)).collect();
        outgoing.shuffle(rng);
        for (&a, &b) in incoming.iter().zip(&outgoing) {
            perm[a] = b;
        }
    }
    ArcPermutation::new(perm)
}

/// Random connected graph with `n ≤ max_n` vertices, random two-point coins,
/// and a flip-flop or random twisted shift.
pub fn random_two_point_instance(rng: &mut impl Rng, max_n: usize) -> Result<Instance> {
    let n = rng.gen_range(2..=max_n.max(2));
    let extra = rng.gen_range(0..=n);
    let graph = random_connected_graph(rng, n, extra)?;
    let coins = random_two_point_coins(rng, &graph)?;
    let shift = if rng.gen_bool(0.5) {
        Shift::FlipFlop
    } else {
        Shift::Twisted(random_one_form(rng, &graph)?)
    };
    Ok(Instance {
        name: format!("random graph n={n}, random coins"),
        graph,
        coins,
        shift,
    })
}

/// `count` instances cycling through cycles, complete graphs, bouquets, the
/// 3×3 torus with moving shift, and random connected graphs, with Grover,
/// moving-shift and random two-point coins. Every graph has at most 12 vertices.
pub fn random_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| instance_of_kind(&mut rng, i % 6)).collect()
}

fn instance_of_kind(rng: &mut ChaCha8Rng, kind: usize) -> Result<Instance> {
    match kind {
        0 => {
            let n = rng.gen_range(3..=12);
            let graph = Graph::cycle(n)?;
            let coins = CoinAssignment::grover(&graph)?;
            Ok(Instance { name: format!("C_{n}, Grover"), graph, coins, shift: Shift::FlipFlop })
        }
        1 => {
            let n = rng.gen_range(3..=6);
            let graph = Graph::complete(n)?;
            let coins = random_two_point_coins(rng, &graph)?;
            Ok(Instance { name: format!("K_{n}, random coins"), graph, coins, shift: Shift::FlipFlop })
        }
        2 => {
            let d = rng.gen_range(1..=4);
            let graph = Graph::bouquet(d)?;
            let coins = random_two_point_coins(rng, &graph)?;
            let shift = Shift::Twisted(random_one_form(rng, &graph)?);
            Ok(Instance { name: format!("{d}-bouquet, random coins, twisted"), graph, coins, shift })
        }
        3 => {
            let graph = Graph::hypercubic_torus(2, 3)?;
            let pi = ArcPermutation::moving_shift(2, 3)?;
            let (kappa, kappa_prime, p) = if rng.gen_bool(0.5) { (ONE, -ONE, 3) } else { (-ONE, ONE, 1) };
            let coins = CoinAssignment::uniform(&graph, &grover_matrix(4)?, kappa, kappa_prime, p)?;
            Ok(Instance {
                name: format!("Z^2/3 torus, moving shift, p={p}"),
                graph,
                coins,
                shift: Shift::Permutation(pi),
            })
        }
        4 => {
            let n = rng.gen_range(2..=12);
            let extra = rng.gen_range(0..=n);
            let graph = random_connected_graph(rng, n, extra)?;
            let coins = random_two_point_coins(rng, &graph)?;
            Ok(Instance { name: format!("random graph n={n}, random coins"), graph, coins, shift: Shift::FlipFlop })
        }
        _ => {
            let n = rng.gen_range(2..=12);
            let extra = rng.gen_range(1..=n);
            let graph = random_connected_graph(rng, n, extra)?;
            let coins = CoinAssignment::grover(&graph)?;
            let shift = Shift::Twisted(random_one_form(rng, &graph)?);
            Ok(Instance { name: format!("random graph n={n}, Grover, twisted"), graph, coins, shift })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::certify_two_point_spectrum;
    use crate::graph::validate_shift_permutation;

    #[test]
    fn instances_are_deterministic_and_valid() {
        let a = random_instances(7, 12).unwrap();
        let b = random_instances(7, 12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.graph, y.graph);
            assert!(x.graph.is_connected());
            assert!(x.graph.n_vertices() <= 12);
            let (coins, _) = x.flip_flop_form().unwrap();
            certify_two_point_spectrum(&coins, 1e-8).unwrap();
        }
    }

    #[test]
    fn random_permutation_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_connected_graph(&mut rng, 8, 6).unwrap();
            validate_shift_permutation(&g, &random_shift_permutation(&mut rng, &g)).unwrap();
        }
    }

    #[test]
    fn random_coin_has_requested_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (kappa, kappa_prime) = random_certificate_pair(&mut rng);
        let c = random_two_point_coin(&mut rng, 5, 2, kappa, kappa_prime);
        assert!(linalg::unitarity_residual(&c) < 1e-12);
        let trace: c64 = (0..5).map(|i| c[(i, i)]).sum();
        assert!((trace - (kappa * 2.0 + kappa_prime * 3.0)).norm() < 1e-12);
    }
}

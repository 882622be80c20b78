//! Invariant suite: boundary identities, flip-flop rewrite, determinant
//! identity, oracle equivalence, dimension ledger and the lattice formulas.

use std::fmt;
use std::str::FromStr;

use faer::{Col, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coins::{kernel_cons, moving_shift_coin, to_flipflop_coin, CoinAssignment};
use crate::discriminant::{
    block_formula, build_boundary, build_discriminant, conservation_residual, stochastic_sums,
    verify_coin_identity, BoundaryOperator, Discriminant,
};
use crate::graph::{ArcPermutation, Graph};
use crate::lattice::{
    self, discriminant_case_i, discriminant_case_ii, eigen_poly_case_i_quadratic, eigenpoly_coeffs,
    fourier_evolution, moving_shift_sextic, Momentum,
};
use crate::linalg::{self, ONE, ZERO};
use crate::poly;
use crate::sample::{self, random_instances, random_shift_permutation, random_unitary, Instance};
use crate::spectral::{charpoly_identity_check, circle_samples, full_report, ReportOptions};
use crate::walk::{coin_matrix, dense_spectrum, evolution, shift_matrix, DenseOptions, Shift};
use crate::{c64, Error, Result};

/// Deliberate corruption used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Perturbs the boundary operator after it is built.
    CorruptK,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Fault::None),
            "corrupt-k" => Ok(Fault::CorruptK),
            other => Err(Error::InvalidParameter(format!("unknown fault mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Worst observed deviation, or a violation count for integer checks.
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckResult {
    fn bound(name: &str, value: f64, tol: f64) -> Self {
        CheckResult { name: name.to_string(), value, tol, pass: value <= tol }
    }

    fn count(name: &str, violations: usize) -> Self {
        Self::bound(name, violations as f64, 0.0)
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<58} {:>11.3e} {:>9.1e}  {}",
            self.name,
            self.value,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub instances: usize,
    pub lattice_samples: usize,
    pub fault: Fault,
    pub report: ReportOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            instances: 20,
            lattice_samples: 200,
            fault: Fault::None,
            report: ReportOptions::default(),
        }
    }
}

pub const BOUNDARY_ISOMETRY: &str = "boundary isometry |K*K - I|";
pub const BLOCK_FORMULA: &str = "discriminant K*SK equals arc-weight block sum";
pub const COIN_FACTORIZATION: &str = "coin factorization |C - (k-k')KK* - k'I|";

/// Worst-case values of the three boundary identities over `instances`.
pub fn boundary_identities(instances: &[Instance], fault: Fault, tol_cluster: f64) -> Result<[f64; 3]> {
    let mut worst = [0.0f64; 3];
    for inst in instances {
        let (coins, shift) = inst.flip_flop_form()?;
        let g = &inst.graph;
        let cons = kernel_cons(&coins, tol_cluster)?;
        let k = build_boundary(g, &cons)?;
        let mut km = k.matrix().clone();
        if fault == Fault::CorruptK {
            let last = km.ncols() - 1;
            for i in 0..km.nrows() {
                km[(i, 0)] *= 1.01;
                km[(i, last)] += c64::new(1e-3, 0.0);
            }
        }
        let s = shift_matrix(g, &shift)?;
        let c = coin_matrix(g, &coins)?;
        let eye = linalg::identity(km.ncols());
        worst[0] = worst[0].max(linalg::norm(&(km.adjoint() * &km - eye)));
        let t = km.adjoint() * (s.matrix() * &km);
        worst[1] = worst[1].max(linalg::distance(&t, &block_formula(g, &cons, &s)?));
        let corrupted = BoundaryOperator::from_matrix(km, k.p(), k.n_vertices())?;
        worst[2] = worst[2].max(verify_coin_identity(&corrupted, &c, coins.kappa(), coins.kappa_prime()));
    }
    Ok(worst)
}

/// `max ‖S_π C − S₀ C′‖` over random permutations and random unitary coins.
pub fn flip_flop_rewrite_residual(rng: &mut impl Rng, count: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = rng.gen_range(2..=8);
        let extra = rng.gen_range(0..=n);
        let g = sample::random_connected_graph(rng, n, extra)?;
        let pi = random_shift_permutation(rng, &g);
        let matrices = (0..g.n_vertices()).map(|u| random_unitary(rng, g.degree(u))).collect();
        let coins = CoinAssignment::new(&g, matrices, ONE, -ONE, 1)?;
        let rewritten = to_flipflop_coin(&g, &pi, &coins)?;
        let lhs = shift_matrix(&g, &Shift::Permutation(pi))?.matrix() * coin_matrix(&g, &coins)?;
        let rhs = shift_matrix(&g, &Shift::FlipFlop)?.matrix() * coin_matrix(&g, &rewritten)?;
        worst = worst.max(linalg::distance(&lhs, &rhs));
    }
    Ok(worst)
}

/// Worst relative deviation of the determinant identity over `instances`,
/// at `samples` random points on `|λ| = 2` per instance.
pub fn determinant_identity(rng: &mut impl Rng, instances: &[Instance], samples: usize, tol_cluster: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for inst in instances {
        let (coins, shift) = inst.flip_flop_form()?;
        let g = &inst.graph;
        let s = shift_matrix(g, &shift)?;
        let u = evolution(&s, &coin_matrix(g, &coins)?)?;
        let k = build_boundary(g, &kernel_cons(&coins, tol_cluster)?)?;
        let t = build_discriminant(g, &k, &s)?;
        let points = circle_samples(rng, samples, 2.0);
        let dev = charpoly_identity_check(u.matrix(), t.matrix(), coins.kappa(), coins.kappa_prime(), coins.p(), &points)?;
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Worst block-sum deviation and conservation residual on case (i) tori with
/// moving shift, using `f_count` random vectors per torus.
pub fn torus_stochastic_sums(rng: &mut impl Rng, f_count: usize) -> Result<(f64, f64)> {
    let mut sums = 0.0f64;
    let mut conservation = 0.0f64;
    for (dim, size) in [(2, 4), (3, 3)] {
        let g = Graph::hypercubic_torus(dim, size)?;
        let pi = ArcPermutation::moving_shift(dim, size)?;
        let grover = CoinAssignment::uniform(&g, &crate::coins::grover_matrix(2 * dim)?, -ONE, ONE, dim - 1)?;
        let coins = to_flipflop_coin(&g, &pi, &grover)?;
        let cons = crate::coins::KernelBasis::from_columns(
            &coins,
            vec![lattice::case_i_cons(dim)?; g.n_vertices()],
            1e-12,
        )?;
        let s = shift_matrix(&g, &Shift::FlipFlop)?;
        let k = build_boundary(&g, &cons)?;
        let t: Discriminant = build_discriminant(&g, &k, &s)?;
        let (row, col) = stochastic_sums(&t);
        sums = sums.max(row).max(col);
        for _ in 0..f_count {
            let f = Col::from_fn(t.matrix().nrows(), |_| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            conservation = conservation.max(conservation_residual(&t, &f));
        }
    }
    Ok((sums, conservation))
}

/// Largest diameter of the `±1` clusters of `σ·Gr(2d)`, `d = 1..=6`, or
/// infinity if a multiplicity differs from `(d + 1, d − 1)`.
pub fn moving_coin_spectrum() -> Result<f64> {
    let mut worst = 0.0f64;
    for d in 1..=6 {
        let spec = dense_spectrum(&moving_shift_coin(d)?, &DenseOptions::default())?;
        let plus: Vec<_> = spec.clusters.iter().filter(|c| (c.value - ONE).norm() < 1e-6).collect();
        let minus: Vec<_> = spec.clusters.iter().filter(|c| (c.value + ONE).norm() < 1e-6).collect();
        let mp: usize = plus.iter().map(|c| c.multiplicity).sum();
        let mm: usize = minus.iter().map(|c| c.multiplicity).sum();
        if (mp, mm) != (d + 1, d - 1) || plus.len() > 1 || minus.len() > 1 {
            return Ok(f64::INFINITY);
        }
        for c in plus.iter().chain(&minus) {
            worst = worst.max(c.diameter);
        }
    }
    Ok(worst)
}

fn random_momentum(rng: &mut impl Rng, d: usize) -> Momentum {
    Momentum::new((0..d).map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI)).collect())
        .expect("sampled inside [0, 2π)")
}

/// Worst gap between the case (i) quadratic roots and `Spec T̂(k)`, `d = 3`.
pub fn case_i_quadratic_gap(rng: &mut impl Rng, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let k = random_momentum(rng, 3);
        let eigs = linalg::hermitian_eigenvalues(&discriminant_case_i(&k)?)?;
        let roots = eigen_poly_case_i_quadratic(&k)?;
        for (a, b) in eigs.iter().zip(roots) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Worst relative gap between the sextic and `det(λ − Û(k))`, `d = 3`, at
/// random `λ` with `|λ| ≤ 2`.
pub fn sextic_gap(rng: &mut impl Rng, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let k = random_momentum(rng, 3);
        let u = fourier_evolution(&k);
        let lambda = c64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(-3.2..3.2));
        let m = Mat::from_fn(6, 6, |i, j| (if i == j { lambda } else { ZERO }) - u[(i, j)]);
        let det = m.determinant();
        let closed = moving_shift_sextic(&k, lambda)?;
        worst = worst.max((det - closed).norm() / (1.0 + closed.norm()));
    }
    Ok(worst)
}

/// Worst lifted-value gap for `d = 3` case (i): each interior `μ` of `T̂(k)`
/// must give `−e^{±i arccos μ}` in `Spec Û(k)`.
pub fn case_i_lift_gap(rng: &mut impl Rng, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let k = random_momentum(rng, 3);
        let spec = dense_spectrum(&fourier_evolution(&k), &DenseOptions::default())?.eigenvalues;
        for mu in linalg::hermitian_eigenvalues(&discriminant_case_i(&k)?)? {
            let a = mu.clamp(-1.0, 1.0).acos();
            for target in [-c64::from_polar(1.0, a), -c64::from_polar(1.0, -a)] {
                let gap = spec.iter().map(|z| (*z - target).norm()).fold(f64::INFINITY, f64::min);
                worst = worst.max(gap);
            }
        }
    }
    Ok(worst)
}

/// Worst coefficient gap between the η polynomial and the char poly of the
/// arrow matrix, and worst `|P(±1)|`, over `d ∈ dims`.
pub fn eigenpoly_gaps(rng: &mut impl Rng, dims: &[usize], samples: usize) -> (f64, f64) {
    let mut coeff = 0.0f64;
    let mut at_pm1 = 0.0f64;
    for &d in dims {
        for _ in 0..samples {
            let k = random_momentum(rng, d);
            let e = eigenpoly_coeffs(&k);
            let direct = poly::charpoly(&discriminant_case_ii(&k));
            for (a, b) in e.monic().iter().zip(&direct) {
                coeff = coeff.max((c64::new(*a, 0.0) - b).norm());
            }
            at_pm1 = at_pm1.max(e.eval(1.0).abs()).max(e.eval(-1.0).abs());
        }
    }
    (coeff, at_pm1)
}

/// Number of grid points (including `k_j ∈ {0, π}`) where the `±1`
/// multiplicities disagree with the exceptional-set rule.
pub fn exceptional_mismatches(dims: &[usize], n: usize) -> usize {
    let mut bad = 0;
    for &d in dims {
        for k in lattice::momentum_grid(d, n) {
            let cos: Vec<f64> = k.values().iter().map(|x| x.cos()).collect();
            let at = |t: f64| cos.iter().filter(|c| (*c - t).abs() <= lattice::EXCEPTIONAL_TOL).count();
            let m = lattice::pm1_multiplicity(&k);
            let plus_ok = (m.m_plus >= 2) == (at(-1.0) >= 2) && m.m_plus >= 1;
            let minus_ok = (m.m_minus >= 2) == (at(1.0) >= 2) && m.m_minus >= 1;
            if !(plus_ok && minus_ok) {
                bad += 1;
            }
        }
    }
    bad
}

/// `max_d ‖Û(0) − Gr(2d)‖_max`, plus the number of `d` where `Spec Û(0)` or
/// the char poly of `T̂(0)` has the wrong shape.
pub fn zero_momentum(dims: &[usize]) -> Result<(f64, usize)> {
    let mut entry = 0.0f64;
    let mut bad = 0;
    for &d in dims {
        let k = Momentum::new(vec![0.0; d])?;
        let u = fourier_evolution(&k);
        entry = entry.max(linalg::max_abs(&(&u - crate::coins::grover_matrix(2 * d)?)));
        let spec = dense_spectrum(&u, &DenseOptions::default())?.eigenvalues;
        let ones = spec.iter().filter(|z| (**z - ONE).norm() < 1e-9).count();
        let minus = spec.iter().filter(|z| (**z + ONE).norm() < 1e-9).count();
        // (x − 1)(x + 1)^d
        let mut expected = vec![1.0, -1.0];
        for _ in 0..d {
            let mut next = vec![0.0; expected.len() + 1];
            for (i, c) in expected.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c;
            }
            expected = next;
        }
        let direct = poly::charpoly(&discriminant_case_ii(&k));
        let poly_ok = expected.iter().zip(&direct).all(|(a, b)| (c64::new(*a, 0.0) - b).norm() <= 1e-12);
        if ones != 1 || minus != 2 * d - 1 || !poly_ok {
            bad += 1;
        }
    }
    Ok((entry, bad))
}

/// Runs every check. Instances and samples are drawn from a single generator
/// seeded with `opts.seed`.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let instances = random_instances(opts.seed, opts.instances)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_0fc0_ffee);
    let rep = &opts.report;
    let mut out = Vec::new();

    let [iso, block, coin] = boundary_identities(&instances, opts.fault, rep.tol_cluster)?;
    out.push(CheckResult::bound(BOUNDARY_ISOMETRY, iso, 1e-10));
    out.push(CheckResult::bound(BLOCK_FORMULA, block, 1e-10));
    out.push(CheckResult::bound(COIN_FACTORIZATION, coin, 1e-10));

    out.push(CheckResult::bound(
        "moving shift rewritten as flip-flop |S_pi C - S_0 C'|",
        flip_flop_rewrite_residual(&mut rng, 20)?,
        1e-12,
    ));
    out.push(CheckResult::bound(
        "determinant identity at 16 points on |lambda| = 2",
        determinant_identity(&mut rng, &instances, 16, rep.tol_cluster)?,
        1e-8,
    ));

    let mut oracle = 0.0f64;
    let mut lift = 0.0f64;
    let mut exclusion = 0usize;
    let mut ledger = 0usize;
    for inst in &instances {
        let report = full_report(&inst.graph, &inst.coins, &inst.shift, rep)
            .map_err(|e| e.context(format!("instance {}", inst.name)))?;
        oracle = oracle.max(report.oracle_delta);
        lift = lift.max(report.max_lift_residual);
        if report.exclusion_gap.is_some_and(|gap| gap <= crate::spectral::BOUNDARY_TOL) {
            exclusion += 1;
        }
        ledger += report.ledger_identities().iter().filter(|(_, ok)| !ok).count();
    }
    out.push(CheckResult::bound("lifted spectrum equals dense oracle (angular)", oracle, rep.oracle_tol));
    out.push(CheckResult::bound("lifted eigenvector residual |U psi - lambda psi|", lift, rep.tol_residual));
    out.push(CheckResult::count("+-kappa' excluded from lifted spectrum (violations)", exclusion));
    out.push(CheckResult::count("dimension ledger identities (violations)", ledger));

    out.push(CheckResult::bound("sigma Gr(2d) spectrum {1^(d+1), -1^(d-1)}, d = 1..6", moving_coin_spectrum()?, 1e-10));
    let (sums, conservation) = torus_stochastic_sums(&mut rng, 10)?;
    out.push(CheckResult::bound("case (i) torus block row/column sums equal I_p", sums, 1e-10));
    out.push(CheckResult::bound("case (i) torus conservation of total mass", conservation, 1e-10));

    let n = opts.lattice_samples;
    out.push(CheckResult::bound("d=3 case (i) quadratic roots equal Spec T(k)", case_i_quadratic_gap(&mut rng, n)?, 1e-10));
    out.push(CheckResult::bound("d=3 sextic equals det(lambda - U(k))", sextic_gap(&mut rng, n.min(100))?, 1e-9));
    out.push(CheckResult::bound("d=3 case (i) lifts are -exp(+-i arccos mu)", case_i_lift_gap(&mut rng, n.min(100))?, 1e-7));
    let (coeff, at_pm1) = eigenpoly_gaps(&mut rng, &[2, 3, 4], n);
    out.push(CheckResult::bound("eta polynomial equals arrow char poly, d = 2..4", coeff, 1e-10));
    out.push(CheckResult::bound("P(+1) = P(-1) = 0, d = 2..4", at_pm1, 1e-10));
    out.push(CheckResult::count(
        "+-1 multiplicities follow exceptional sets (mismatches)",
        exceptional_mismatches(&[2, 3, 4], 4),
    ));
    let (entry, shape) = zero_momentum(&[2, 3, 4])?;
    out.push(CheckResult::bound("U(0) equals Gr(2d) entrywise", entry, 1e-14));
    out.push(CheckResult::count("k = 0 spectrum and char poly shape (violations)", shape));
    Ok(out)
}

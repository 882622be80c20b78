//! Fourier-space Grover walk with moving shift on `Z^d`.
//!
//! After the flip-flop rewrite the walk lives on the `d`-bouquet with coin
//! `σ·Gr(2d)` and twisted shift `θ(±j) = ±k_j`. Local labels follow the
//! bouquet arc order `+1, −1, +2, −2, …`. Two certificates are supported:
//! case (i) `(κ, κ′) = (−1, 1)`, `p = d − 1`, and case (ii) `(1, −1)`, `p = d + 1`.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;

use crate::coins::{moving_shift_coin, CoinAssignment, KernelBasis};
use crate::graph::Graph;
use crate::linalg::{self, ONE, ZERO};
use crate::poly;
use crate::spectral::{full_report_with_basis, ReportOptions, SpectrumReport};
use crate::walk::{OneForm, Shift};
use crate::{c64, CMat, Error, Result};

/// Wave number `k ∈ [0, 2π)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Momentum {
    k: Vec<f64>,
}

impl Momentum {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidParameter("momentum needs at least one component".into()));
        }
        if let Some(bad) = k.iter().find(|x| !(0.0..2.0 * PI).contains(*x)) {
            return Err(Error::InvalidParameter(format!("momentum component {bad} outside [0, 2π)")));
        }
        Ok(Momentum { k })
    }

    /// Reduces every component into `[0, 2π)`.
    pub fn wrapped(k: Vec<f64>) -> Result<Self> {
        Self::new(
            k.into_iter()
                .map(|x| {
                    let r = x.rem_euclid(2.0 * PI);
                    if r >= 2.0 * PI { 0.0 } else { r }
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.k
    }

    fn cosines(&self) -> Vec<f64> {
        self.k.iter().map(|x| x.cos()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `(κ, κ′) = (−1, 1)`, `p = d − 1`.
    CaseI,
    /// `(κ, κ′) = (1, −1)`, `p = d + 1`.
    CaseII,
}

impl Convention {
    /// `(κ, κ′, p)` in dimension `d`.
    pub fn certificate(self, d: usize) -> Result<(c64, c64, usize)> {
        match self {
            Convention::CaseI if d < 2 => Err(Error::InvalidParameter(
                "case (i) needs d >= 2: the discriminant is empty for d = 1".into(),
            )),
            Convention::CaseI => Ok((-ONE, ONE, d - 1)),
            Convention::CaseII => Ok((ONE, -ONE, d + 1)),
        }
    }

    pub fn cons(self, d: usize) -> Result<CMat> {
        match self {
            Convention::CaseI => case_i_cons(d),
            Convention::CaseII => case_ii_cons(d),
        }
    }
}

/// `(Ŝ(k)g)(εj) = e^{iεk_j} g(−εj)`.
pub fn fourier_shift(k: &Momentum) -> CMat {
    let d = k.dim();
    let mut s = Mat::zeros(2 * d, 2 * d);
    for (j, &kj) in k.values().iter().enumerate() {
        s[(2 * j, 2 * j + 1)] = c64::from_polar(1.0, kj);
        s[(2 * j + 1, 2 * j)] = c64::from_polar(1.0, -kj);
    }
    s
}

/// The one-form on the `d`-bouquet that realizes [`fourier_shift`].
pub fn fourier_one_form(bouquet: &Graph, k: &Momentum) -> Result<OneForm> {
    let theta = (0..2 * k.dim())
        .map(|a| if a % 2 == 0 { k.values()[a / 2] } else { -k.values()[a / 2] })
        .collect();
    OneForm::new(bouquet, theta)
}

/// `Û(k) = Ŝ(k) σ Gr(2d)`.
pub fn fourier_evolution(k: &Momentum) -> CMat {
    let coin = moving_shift_coin(k.dim()).expect("momentum has positive dimension");
    fourier_shift(k) * coin
}

/// Case (i) basis `(1/√(2d)) [1, ω^j, …, ω^{(d−1)j}] ⊗ [1, 1]`, `j = 1..d−1`, `ω = e^{2πi/d}`.
pub fn case_i_cons(d: usize) -> Result<CMat> {
    if d < 2 {
        return Err(Error::InvalidParameter("case (i) needs d >= 2".into()));
    }
    let norm = 1.0 / (2.0 * d as f64).sqrt();
    Ok(Mat::from_fn(2 * d, d - 1, |row, col| {
        let m = (row / 2) as f64;
        let j = (col + 1) as f64;
        c64::from_polar(norm, 2.0 * PI * j * m / d as f64)
    }))
}

/// Case (ii) basis: the uniform vector, then `e_j ⊗ [1, −1] / √2`.
pub fn case_ii_cons(d: usize) -> Result<CMat> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let uniform = 1.0 / (2.0 * d as f64).sqrt();
    let pair = 1.0 / 2f64.sqrt();
    Ok(Mat::from_fn(2 * d, d + 1, |row, col| {
        if col == 0 {
            c64::new(uniform, 0.0)
        } else if row / 2 == col - 1 {
            c64::new(if row % 2 == 0 { pair } else { -pair }, 0.0)
        } else {
            ZERO
        }
    }))
}

fn compress(k: &Momentum, basis: &CMat) -> CMat {
    basis.adjoint() * (fourier_shift(k) * basis)
}

/// `T̂(k) = K_o* Ŝ(k) K_o` with the case (i) basis.
pub fn discriminant_case_i(k: &Momentum) -> Result<CMat> {
    Ok(compress(k, &case_i_cons(k.dim())?))
}

/// Case (ii) arrow matrix: `(1/d)Σ cos k_j` in the corner, `∓(i/√d) sin k_j`
/// on the border, `−cos k_j` on the diagonal.
pub fn discriminant_case_ii(k: &Momentum) -> CMat {
    let d = k.dim();
    let sqrt_d = (d as f64).sqrt();
    let corner = k.values().iter().map(|x| x.cos()).sum::<f64>() / d as f64;
    Mat::from_fn(d + 1, d + 1, |i, j| match (i, j) {
        (0, 0) => c64::new(corner, 0.0),
        (0, j) => c64::new(0.0, -k.values()[j - 1].sin() / sqrt_d),
        (i, 0) => c64::new(0.0, k.values()[i - 1].sin() / sqrt_d),
        (i, j) if i == j => c64::new(-k.values()[i - 1].cos(), 0.0),
        _ => ZERO,
    })
}

/// `K_o* Ŝ(k) K_o` with the case (ii) basis.
pub fn discriminant_case_ii_from_cons(k: &Momentum) -> CMat {
    compress(k, &case_ii_cons(k.dim()).expect("momentum has positive dimension"))
}

fn require_dim(k: &Momentum, d: usize) -> Result<()> {
    if k.dim() == d {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("formula holds for d = {d}, got d = {}", k.dim())))
    }
}

/// Roots of `μ² − (2/3) γ₁ μ + (1/3) γ₂ = 0` for `d = 3`, ascending, where
/// `γ₁ = Σ cos k_j` and `γ₂` is the sum of pairwise products.
pub fn eigen_poly_case_i_quadratic(k: &Momentum) -> Result<[f64; 2]> {
    require_dim(k, 3)?;
    let e = poly::elementary_symmetric(&k.cosines());
    let b = 2.0 / 3.0 * e[1];
    let disc = (b * b - 4.0 / 3.0 * e[2]).max(0.0).sqrt();
    Ok([(b - disc) / 2.0, (b + disc) / 2.0])
}

/// `(λ² − 1)(λ⁴ + (4/3)γ₁λ³ + (2 + (4/3)γ₂)λ² + (4/3)γ₁λ + 1)` for `d = 3`,
/// which equals `det(λ − Û(k))`.
pub fn moving_shift_sextic(k: &Momentum, lambda: c64) -> Result<c64> {
    require_dim(k, 3)?;
    let e = poly::elementary_symmetric(&k.cosines());
    let (g1, g2) = (4.0 / 3.0 * e[1], 2.0 + 4.0 / 3.0 * e[2]);
    let quartic = poly::eval_complex(&[1.0, g1, g2, g1, 1.0], lambda);
    Ok((lambda * lambda - 1.0) * quartic)
}

/// The two eigenvalues of the case (ii) arrow matrix other than `±1` for `d = 3`:
/// `−(1/3)Σc_j ± (√2/6)√(3 + Σ cos 2k_j − 2(c_x c_y + c_y c_z + c_z c_x))`.
pub fn case_ii_interior_d3(k: &Momentum) -> Result<[f64; 2]> {
    require_dim(k, 3)?;
    let c = k.cosines();
    let e = poly::elementary_symmetric(&c);
    let double: f64 = k.values().iter().map(|x| (2.0 * x).cos()).sum();
    let root = (3.0 + double - 2.0 * e[2]).max(0.0).sqrt() * 2f64.sqrt() / 6.0;
    let centre = -e[1] / 3.0;
    Ok([centre - root, centre + root])
}

/// Coefficients of `P(x) = det(x − T̂(k))` for the case (ii) arrow matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPolyCoeffs {
    /// `η_1 … η_{d+1}`.
    pub eta: Vec<f64>,
    /// `γ_0 … γ_{d+1}` over `Γ = {−(1/d)Σcos k_j, cos k_1, …, cos k_d}`, with `γ_0 = 1`.
    pub gamma: Vec<f64>,
}

impl EigenPolyCoeffs {
    /// `[1, η_1, …, η_{d+1}]`.
    pub fn monic(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.eta.iter().copied()).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        poly::eval(&self.monic(), x)
    }

    pub fn roots(&self) -> Result<Vec<c64>> {
        linalg::companion_roots(&self.monic())
    }
}

/// `η_j = γ_j(Γ) − (1/d) Σ_s γ_{j−2}(Γ^{(0,s)}) sin² k_s`, where `Γ^{(0,s)}`
/// drops the corner entry and `cos k_s`, and `γ_{−1} = 0`.
pub fn eigenpoly_coeffs(k: &Momentum) -> EigenPolyCoeffs {
    let d = k.dim();
    let c = k.cosines();
    let corner = -c.iter().sum::<f64>() / d as f64;
    let full: Vec<f64> = std::iter::once(corner).chain(c.iter().copied()).collect();
    let gamma = poly::elementary_symmetric(&full);
    let reduced: Vec<Vec<f64>> = (0..d)
        .map(|s| {
            let rest: Vec<f64> = c.iter().enumerate().filter(|&(i, _)| i != s).map(|(_, &x)| x).collect();
            poly::elementary_symmetric(&rest)
        })
        .collect();
    let eta = (1..=d + 1)
        .map(|j| {
            let border: f64 = if j >= 2 {
                (0..d)
                    .map(|s| reduced[s].get(j - 2).copied().unwrap_or(0.0) * k.values()[s].sin().powi(2))
                    .sum()
            } else {
                0.0
            };
            gamma[j] - border / d as f64
        })
        .collect();
    EigenPolyCoeffs { eta, gamma }
}

/// Tolerance for `cos k_j = ±1` and for the derivative test at `±1`.
pub const EXCEPTIONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmMultiplicity {
    pub m_plus: usize,
    pub m_minus: usize,
    pub exceptional: bool,
}

/// Whether `#{j : cos k_j = −1} ≥ 2` or `#{j : cos k_j = +1} ≥ 2`.
pub fn is_exceptional(k: &Momentum) -> bool {
    let c = k.cosines();
    let count = |target: f64| c.iter().filter(|x| (*x - target).abs() <= EXCEPTIONAL_TOL).count();
    count(-1.0) >= 2 || count(1.0) >= 2
}

/// Multiplicities of `±1` as roots of `P`, and the exceptional flag.
pub fn pm1_multiplicity(k: &Momentum) -> PmMultiplicity {
    let p = eigenpoly_coeffs(k).monic();
    PmMultiplicity {
        m_plus: poly::root_multiplicity(&p, 1.0, EXCEPTIONAL_TOL),
        m_minus: poly::root_multiplicity(&p, -1.0, EXCEPTIONAL_TOL),
        exceptional: is_exceptional(k),
    }
}

/// Bouquet graph, coins, kernel basis and shift realizing `Û(k)` under `convention`.
pub fn lattice_instance(
    k: &Momentum,
    convention: Convention,
) -> Result<(Graph, CoinAssignment, KernelBasis, Shift)> {
    let d = k.dim();
    let (kappa, kappa_prime, p) = convention.certificate(d)?;
    let g = Graph::bouquet(d)?;
    let coins = CoinAssignment::uniform(&g, &moving_shift_coin(d)?, kappa, kappa_prime, p)?;
    let cons = KernelBasis::from_columns(&coins, vec![convention.cons(d)?], 1e-12)?;
    let shift = Shift::Twisted(fourier_one_form(&g, k)?);
    Ok((g, coins, cons, shift))
}

/// Full spectral report for `Û(k)`.
pub fn lattice_report(k: &Momentum, convention: Convention, opts: &ReportOptions) -> Result<SpectrumReport> {
    let (g, coins, cons, shift) = lattice_instance(k, convention)?;
    full_report_with_basis(&g, &coins, Some(&cons), &shift, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    pub k: Vec<f64>,
    /// Eigenvalues of `T̂(k)`, ascending, repeated by multiplicity.
    pub t_spectrum: Vec<f64>,
    /// Eigenvalue angles of `Û(k)` in `(−π, π]`, ascending.
    pub u_angles: Vec<f64>,
    pub m_plus: usize,
    pub m_minus: usize,
    pub exceptional: bool,
    pub residual_plus: usize,
    pub residual_minus: usize,
    pub oracle_delta: f64,
}

/// Grid `k_j = 2π ℓ_j / n`, `ℓ_j = 0..n`, with `k_1` varying slowest.
pub fn momentum_grid(d: usize, n: usize) -> Vec<Momentum> {
    let total = n.pow(d as u32);
    (0..total)
        .map(|idx| {
            let k = (0..d)
                .map(|j| {
                    let l = (idx / n.pow((d - 1 - j) as u32)) % n;
                    2.0 * PI * l as f64 / n as f64
                })
                .collect();
            Momentum { k }
        })
        .collect()
}

fn unit_angle(z: c64) -> f64 {
    if (z + ONE).norm() <= 1e-12 {
        PI
    } else if (z - ONE).norm() <= 1e-12 {
        0.0
    } else {
        linalg::angle(z)
    }
}

/// Spectral report at every grid point, each checked against the dense oracle.
pub fn band_scan(d: usize, n: usize, convention: Convention, opts: &ReportOptions) -> Result<Vec<BandRow>> {
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidParameter(format!("band scan supports 1 <= d <= 4, got {d}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    convention.certificate(d)?;
    momentum_grid(d, n)
        .par_iter()
        .map(|k| {
            let row_err = |reason: String| Error::RowVerification { k: k.values().to_vec(), reason };
            let report = lattice_report(k, convention, opts).map_err(|e| row_err(e.to_string()))?;
            report.check(opts).map_err(|e| row_err(e.to_string()))?;
            let mut t_spectrum: Vec<f64> = report
                .t_eigs
                .iter()
                .flat_map(|c| std::iter::repeat_n(c.mu, c.multiplicity))
                .collect();
            t_spectrum.sort_by(f64::total_cmp);
            let mut u_angles: Vec<f64> = report.oracle_spectrum.iter().map(|&z| unit_angle(z)).collect();
            u_angles.sort_by(f64::total_cmp);
            Ok(BandRow {
                k: k.values().to_vec(),
                t_spectrum,
                u_angles,
                m_plus: report.ledger.m_plus,
                m_minus: report.ledger.m_minus,
                exceptional: is_exceptional(k),
                residual_plus: report.residual.plus_kp,
                residual_minus: report.residual.minus_kp,
                oracle_delta: report.oracle_delta,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::grover_matrix;
    use crate::spectral::eig_discriminant;
    use crate::walk::{dense_spectrum, DenseOptions};
    use proptest::prelude::*;

    fn momentum(k: &[f64]) -> Momentum {
        Momentum::new(k.to_vec()).unwrap()
    }

    fn momentum_strategy(d: usize) -> impl Strategy<Value = Momentum> {
        prop::collection::vec(0.0..2.0 * PI, d).prop_map(|k| Momentum::new(k).unwrap())
    }

    fn sorted_eigs(m: &CMat) -> Vec<f64> {
        linalg::hermitian_eigenvalues(m).unwrap()
    }

    #[test]
    fn momentum_range_checked() {
        assert!(Momentum::new(vec![2.0 * PI]).is_err());
        assert!(Momentum::new(vec![-0.1]).is_err());
        assert!(Momentum::wrapped(vec![-0.1, 7.0]).is_ok());
    }

    #[test]
    fn shift_at_zero_and_pi() {
        let s0 = fourier_shift(&momentum(&[0.0, 0.0, 0.0]));
        let g = Graph::bouquet(3).unwrap();
        let flip = crate::walk::shift_matrix(&g, &Shift::FlipFlop).unwrap();
        assert_eq!(linalg::distance(&s0, flip.matrix()), 0.0);
        let s = fourier_shift(&momentum(&[PI]));
        assert!((s[(0, 1)] + ONE).norm() < 1e-15 && (s[(1, 0)] + ONE).norm() < 1e-15);
        assert_eq!(s[(0, 0)], ZERO);
    }

    #[test]
    fn evolution_at_zero_is_grover() {
        for d in 1..=4 {
            let u = fourier_evolution(&momentum(&vec![0.0; d]));
            assert!(linalg::max_abs(&(&u - grover_matrix(2 * d).unwrap())) <= 1e-14);
        }
    }

    #[test]
    fn case_i_d3_at_zero() {
        let t = discriminant_case_i(&momentum(&[0.0; 3])).unwrap();
        assert!(linalg::distance(&t, &linalg::identity(2)) < 1e-14);
        assert_eq!(eigen_poly_case_i_quadratic(&momentum(&[0.0; 3])).unwrap(), [1.0, 1.0]);
    }

    #[test]
    fn case_i_d2_scalar() {
        // p = 1 with α = (1/2)[1, 1, −1, −1]: T̂ = (cos k_x + cos k_y) / 2.
        let k = momentum(&[0.4, 2.2]);
        let t = discriminant_case_i(&k).unwrap();
        assert_eq!((t.nrows(), t.ncols()), (1, 1));
        assert!((t[(0, 0)] - c64::new((0.4f64.cos() + 2.2f64.cos()) / 2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn case_i_rejects_d1() {
        assert!(discriminant_case_i(&momentum(&[0.3])).is_err());
        assert!(Convention::CaseI.certificate(1).is_err());
    }

    #[test]
    fn arrow_at_zero() {
        for d in 1..=4 {
            let t = discriminant_case_ii(&momentum(&vec![0.0; d]));
            let expected = Mat::from_fn(d + 1, d + 1, |i, j| match (i, j) {
                (0, 0) => ONE,
                (i, j) if i == j => -ONE,
                _ => ZERO,
            });
            assert!(linalg::distance(&t, &expected) < 1e-15);
            let eigs = eig_discriminant(&t, 1e-8).unwrap();
            assert_eq!(eigs.iter().map(|c| (c.mu, c.multiplicity)).collect::<Vec<_>>(), vec![(-1.0, d), (1.0, 1)]);
        }
    }

    #[test]
    fn arrow_d3_entries() {
        let k = momentum(&[0.3, 1.7, 4.0]);
        let t = discriminant_case_ii(&k);
        let c: f64 = k.values().iter().map(|x| x.cos()).sum();
        assert!((t[(0, 0)].re - c / 3.0).abs() < 1e-15);
        for j in 1..=3 {
            let s = k.values()[j - 1].sin() / 3f64.sqrt();
            assert!((t[(0, j)] - c64::new(0.0, -s)).norm() < 1e-15);
            assert!((t[(j, 0)] - c64::new(0.0, s)).norm() < 1e-15);
            assert!((t[(j, j)].re + k.values()[j - 1].cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn exceptional_examples() {
        let generic = pm1_multiplicity(&momentum(&[0.3, 1.1, 2.5]));
        assert_eq!(generic, PmMultiplicity { m_plus: 1, m_minus: 1, exceptional: false });
        let two_zero = pm1_multiplicity(&momentum(&[0.0, 0.0, 1.3]));
        assert!(two_zero.exceptional);
        assert_eq!(two_zero.m_minus, 2);
        assert_eq!(two_zero.m_plus, 1);
        for d in 2..=4 {
            assert_eq!(pm1_multiplicity(&momentum(&vec![0.0; d])).m_minus, d);
        }
        let two_pi = pm1_multiplicity(&momentum(&[PI, PI, 0.7]));
        assert_eq!((two_pi.m_plus, two_pi.m_minus, two_pi.exceptional), (2, 1, true));
    }

    #[test]
    fn eta_one_is_gamma_one() {
        let k = momentum(&[0.5, 2.0, 3.3, 5.9]);
        let e = eigenpoly_coeffs(&k);
        let s: f64 = k.values().iter().map(|x| x.cos()).sum();
        assert!((e.eta[0] - (s - s / 4.0)).abs() < 1e-15);
        assert_eq!(e.gamma[0], 1.0);
    }

    #[test]
    fn zero_momentum_polynomial_d3() {
        let e = eigenpoly_coeffs(&momentum(&[0.0; 3]));
        let expected = [1.0, 2.0, 0.0, -2.0, -1.0];
        for (a, b) in e.monic().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_order_and_size() {
        let grid = momentum_grid(2, 3);
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[1].values(), &[0.0, 2.0 * PI / 3.0]);
        assert_eq!(grid[3].values(), &[2.0 * PI / 3.0, 0.0]);
    }

    #[test]
    fn band_scan_case_i_d3() {
        let rows = band_scan(3, 4, Convention::CaseI, &ReportOptions::default()).unwrap();
        assert_eq!(rows.len(), 64);
        assert!(rows.iter().all(|r| r.oracle_delta <= 1e-7));
    }

    #[test]
    fn band_scan_case_ii_d2_residuals() {
        let rows = band_scan(2, 8, Convention::CaseII, &ReportOptions::default()).unwrap();
        for r in rows.iter().filter(|r| !r.exceptional) {
            assert_eq!((r.residual_plus, r.residual_minus), (0, 0));
        }
        let origin = &rows[0];
        assert_eq!(origin.m_minus, 2);
    }

    #[test]
    fn zero_row_spectrum_d3() {
        let rows = band_scan(3, 2, Convention::CaseII, &ReportOptions::default()).unwrap();
        let a = &rows[0].u_angles;
        assert_eq!(a.iter().filter(|x| x.abs() < 1e-9).count(), 1);
        assert_eq!(a.iter().filter(|x| (*x - PI).abs() < 1e-9).count(), 5);
    }

    proptest! {
        #[test]
        fn shift_is_unitary_involution(k in momentum_strategy(3)) {
            let s = fourier_shift(&k);
            prop_assert!(linalg::distance(&(&s * &s), &linalg::identity(6)) <= 1e-12);
            prop_assert!(linalg::unitarity_residual(&fourier_evolution(&k)) <= 1e-12);
        }

        #[test]
        fn arrow_matches_compression(k in momentum_strategy(4)) {
            prop_assert!(linalg::distance(&discriminant_case_ii(&k), &discriminant_case_ii_from_cons(&k)) <= 1e-12);
        }

        #[test]
        fn case_i_quadratic_matches_spectrum(k in momentum_strategy(3)) {
            let eigs = sorted_eigs(&discriminant_case_i(&k).unwrap());
            let roots = eigen_poly_case_i_quadratic(&k).unwrap();
            for (a, b) in eigs.iter().zip(roots) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }

        #[test]
        fn sextic_matches_determinant(k in momentum_strategy(3), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let lambda = c64::new(re, im);
            let u = fourier_evolution(&k);
            let m = Mat::from_fn(6, 6, |i, j| (if i == j { lambda } else { ZERO }) - u[(i, j)]);
            let det = m.determinant();
            let sextic = moving_shift_sextic(&k, lambda).unwrap();
            prop_assert!((det - sextic).norm() <= 1e-9 * (1.0 + sextic.norm()));
        }

        #[test]
        fn interior_formula_matches_spectrum(k in momentum_strategy(3)) {
            let eigs = sorted_eigs(&discriminant_case_ii(&k));
            let [lo, hi] = case_ii_interior_d3(&k).unwrap();
            let mut expected = vec![-1.0, 1.0, lo, hi];
            expected.sort_by(f64::total_cmp);
            for (a, b) in eigs.iter().zip(expected) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }

        #[test]
        fn eigenpoly_matches_charpoly(k in momentum_strategy(3)) {
            let e = eigenpoly_coeffs(&k);
            let direct = poly::charpoly(&discriminant_case_ii(&k));
            for (a, b) in e.monic().iter().zip(&direct) {
                prop_assert!((c64::new(*a, 0.0) - b).norm() <= 1e-10);
            }
            prop_assert!(e.eval(1.0).abs() <= 1e-10 && e.eval(-1.0).abs() <= 1e-10);
        }

        #[test]
        fn eigenpoly_roots_are_spectrum(k in momentum_strategy(2)) {
            let mut roots: Vec<f64> = eigenpoly_coeffs(&k).roots().unwrap().iter().map(|z| z.re).collect();
            roots.sort_by(f64::total_cmp);
            let eigs = sorted_eigs(&discriminant_case_ii(&k));
            for (a, b) in roots.iter().zip(&eigs) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }

        #[test]
        fn interior_roots_lift_into_evolution_spectrum(k in momentum_strategy(3)) {
            let u = fourier_evolution(&k);
            let spec = dense_spectrum(&u, &DenseOptions::default()).unwrap().eigenvalues;
            let near = |target: c64| spec.iter().any(|z| (*z - target).norm() <= 1e-7);
            for mu in sorted_eigs(&discriminant_case_ii(&k)) {
                if (mu.abs() - 1.0).abs() > 1e-6 {
                    let a = mu.acos();
                    prop_assert!(near(c64::from_polar(1.0, a)) && near(c64::from_polar(1.0, -a)));
                }
            }
            for mu in sorted_eigs(&discriminant_case_i(&k).unwrap()) {
                if (mu.abs() - 1.0).abs() > 1e-6 {
                    let a = mu.acos();
                    prop_assert!(near(-c64::from_polar(1.0, a)) && near(-c64::from_polar(1.0, -a)));
                }
            }
        }
    }
}

//! Real and complex polynomial utilities. Coefficients are stored highest
//! degree first; monic polynomials start with `1`.

use crate::{c64, CMat};

/// Elementary symmetric polynomials `e_0 = 1, e_1, …, e_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (n, &v) in values.iter().enumerate() {
        for j in (1..=n + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// Monic coefficients of `det(xI − A)` by the Faddeev–LeVerrier recursion.
pub fn charpoly(a: &CMat) -> Vec<c64> {
    let n = a.nrows();
    let mut coeffs = vec![c64::new(1.0, 0.0)];
    let mut m = CMat::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        m = next;
        let am = a * &m;
        let trace: c64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-trace / k as f64);
    }
    coeffs
}

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_complex(coeffs: &[f64], x: c64) -> c64 {
    coeffs.iter().fold(c64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let deg = coeffs.len().saturating_sub(1);
    coeffs[..deg]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

/// Order of vanishing of the polynomial at `x`: the number of leading
/// derivatives `P, P′, …` with `|P^{(m)}(x)| ≤ tol · Σ|coefficients of P^{(m)}|`.
pub fn root_multiplicity(coeffs: &[f64], x: f64, tol: f64) -> usize {
    let mut current = coeffs.to_vec();
    let mut m = 0;
    while current.len() > 1 {
        let scale: f64 = current.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
        if eval(&current, x).abs() > tol * scale {
            break;
        }
        m += 1;
        current = derivative(&current);
    }
    m
}

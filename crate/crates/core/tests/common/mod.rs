//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taylor_lcu::hamiltonian::{from_weights, parse_hamiltonian, SortedHamiltonian};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(p: char) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        other => panic!("not a Pauli label: {other}"),
    }
}

/// Kronecker product over the label, leftmost character most significant.
pub fn pauli_kron(label: &str) -> CMat {
    label
        .chars()
        .map(pauli_2x2)
        .fold(CMat::identity(1, 1), |acc, p| acc.kronecker(&p))
}

/// `sum_l c_l P_l` from raw (coefficient, label) pairs.
pub fn raw_matrix(terms: &[(Complex64, String)]) -> CMat {
    let dim = 1 << terms[0].1.len();
    terms
        .iter()
        .fold(CMat::zeros(dim, dim), |acc, (coef, label)| acc + pauli_kron(label) * *coef)
}

/// `h_l = phase_l P_l` for each sorted term.
pub fn term_matrices(h: &SortedHamiltonian) -> Vec<CMat> {
    h.terms()
        .iter()
        .map(|t| pauli_kron(&t.op.label()) * t.op.phase().to_complex())
        .collect()
}

/// `sum_{l<m} alpha_l h_l`.
pub fn prefix_matrix(h: &SortedHamiltonian, m: usize) -> CMat {
    let dim = 1 << h.qubit_count();
    h.terms()[..m]
        .iter()
        .zip(term_matrices(h))
        .fold(CMat::zeros(dim, dim), |acc, (t, p)| acc + p * c(t.alpha, 0.0))
}

/// `exp(m)` by scaling and squaring with a degree-18 Taylor polynomial.
pub fn expm(m: &CMat) -> CMat {
    let norm1 = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let a = m * c(0.5f64.powi(squarings as i32), 0.0);
    let n = m.nrows();
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=18 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Largest singular value from the eigenvalues of `M^dag M`.
pub fn spectral_norm(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    gram.symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
        .max(0.0)
        .sqrt()
}

/// `s_L(t) = sum_k t^k / k! prod_{j<=k} Lambda_j` with each `Lambda_j`
/// summed from scratch.
pub fn s_oracle(alphas: &[f64], levels: &[usize], t: f64) -> f64 {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut total = 1.0;
    let mut product = 1.0;
    for (i, &l) in levels.iter().enumerate() {
        let lambda_j: f64 = sorted[..l].iter().sum();
        product *= lambda_j * t / (i + 1) as f64;
        total += product;
    }
    total
}

/// `d/dt s_L(t)`.
pub fn s_derivative_oracle(alphas: &[f64], levels: &[usize], t: f64) -> f64 {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut total = 0.0;
    let mut product = 1.0;
    for (i, &l) in levels.iter().enumerate() {
        let lambda_j: f64 = sorted[..l].iter().sum();
        let k = (i + 1) as f64;
        total += product * lambda_j;
        product *= lambda_j * t / k;
    }
    total
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_label(rng: &mut impl Rng, qubits: usize) -> String {
    (0..qubits).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect()
}

/// Real-coefficient random Hamiltonian with random signs, built through the
/// parser. Returns the raw terms as well.
pub fn random_real_hamiltonian(
    rng: &mut impl Rng,
    qubits: usize,
    terms: usize,
) -> (SortedHamiltonian, Vec<(Complex64, String)>) {
    let raw: Vec<(Complex64, String)> = (0..terms)
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-2.0..0.3));
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (c(sign * mag, 0.0), random_label(rng, qubits))
        })
        .collect();
    let text: String = raw.iter().map(|(z, l)| format!("{} {l}\n", z.re)).collect();
    (parse_hamiltonian(&text).unwrap(), raw)
}

/// Distinct Pauli strings with weights drawn log-uniformly from `[1e-3, 1]`.
pub fn random_weighted(rng: &mut impl Rng, qubits: usize, terms: usize) -> SortedHamiltonian {
    let weights: Vec<f64> = (0..terms).map(|_| 10f64.powf(rng.random_range(-3.0..0.0))).collect();
    from_weights(&weights, qubits).unwrap()
}

pub fn ln2_pow_over_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * std::f64::consts::LN_2 / k as f64)
}

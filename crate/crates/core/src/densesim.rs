//! Exact dense-matrix verification on small systems.
//!
//! Builds `U(t) = exp(-iHt)`, the truncated series `U_L(t)`, and the operator
//! actually applied after one round of oblivious amplitude amplification,
//!
//! ```text
//! A_L = (3 / s) U_L - (4 / s^3) U_L U_L^dag U_L,
//! ```
//!
//! and measures the true operator-norm errors against the analytic bounds.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SortedHamiltonian;
use crate::planner::{self, TruncationVector};

pub const DEFAULT_QUBIT_CAP: usize = 12;

/// Environment variable overriding [`DEFAULT_QUBIT_CAP`].
pub const QUBIT_CAP_ENV: &str = "TAYLOR_LCU_QUBIT_CAP";

/// Largest dimension for which [`operator_norm`] uses a full SVD.
pub const SVD_DIM_LIMIT: usize = 64;

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 100_000;

pub fn qubit_cap_from_env() -> usize {
    std::env::var(QUBIT_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_QUBIT_CAP)
}

/// Square complex matrix acting on a register of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "operator must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            matrix: &self.matrix * factor,
        }
    }

    pub fn norm(&self) -> Result<f64> {
        operator_norm(self)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl<'a> Mul<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl<'a> Sub<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl<'a> Add<&'a DenseOperator> for &'a DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &'a DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

/// Largest singular value: full SVD up to [`SVD_DIM_LIMIT`], power iteration
/// on `M^dag M` above.
pub fn operator_norm(op: &DenseOperator) -> Result<f64> {
    if op.dim() <= SVD_DIM_LIMIT {
        Ok(svd_norm(op.matrix()))
    } else {
        power_iteration_norm(op.matrix())
    }
}

pub fn svd_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Power iteration on `M^dag M` until the Rayleigh quotient changes by less
/// than `1e-12` (relative).
pub fn power_iteration_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    let n = m.ncols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::<Complex64>::from_fn(n, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    v /= Complex64::from(v.norm());
    let adjoint = m.adjoint();
    let mut previous = 0.0;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = m * &v;
        let rayleigh = w.norm_squared();
        let u = &adjoint * w;
        let len = u.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        if (rayleigh - previous).abs() <= POWER_TOLERANCE * rayleigh {
            return Ok(rayleigh.sqrt());
        }
        previous = rayleigh;
        v = u / Complex64::from(len);
    }
    Err(Error::NoConvergence(format!(
        "power iteration did not converge in {POWER_MAX_ITERATIONS} iterations"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepError {
    pub r: usize,
    pub error: f64,
}

/// Bound and measured errors for one truncation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub levels: TruncationVector,
    pub cost: usize,
    pub epsilon: f64,
    /// `||U(t_inf) - A_L(t_inf)||`
    pub delta: f64,
    /// `||U^r - A_L^r||` for `r = 1, 2, ...`; empty for single-step reports.
    pub r_step: Vec<StepError>,
}

/// Dense operators for one Hamiltonian, on at most `qubit_cap` qubits.
pub struct DenseSimulator<'a> {
    h: &'a SortedHamiltonian,
    spectrum: OnceLock<(DVector<f64>, DMatrix<Complex64>)>,
}

impl<'a> DenseSimulator<'a> {
    /// Uses the qubit cap from [`QUBIT_CAP_ENV`], or [`DEFAULT_QUBIT_CAP`].
    pub fn new(h: &'a SortedHamiltonian) -> Result<Self> {
        Self::with_cap(h, qubit_cap_from_env())
    }

    pub fn with_cap(h: &'a SortedHamiltonian, qubit_cap: usize) -> Result<Self> {
        if h.qubit_count() > qubit_cap {
            return Err(Error::CapExceeded {
                what: "dense simulation qubit count",
                required: h.qubit_count(),
                cap: qubit_cap,
            });
        }
        Ok(Self {
            h,
            spectrum: OnceLock::new(),
        })
    }

    pub fn hamiltonian(&self) -> &SortedHamiltonian {
        self.h
    }

    pub fn dim(&self) -> usize {
        1 << self.h.qubit_count()
    }

    /// Sum of the `m` largest terms, `sum_{l<m} alpha_l (phase * P)_l`.
    pub fn hamiltonian_matrix(&self, m: usize) -> Result<DenseOperator> {
        if m > self.h.len() {
            return Err(Error::invalid(format!(
                "prefix length {m} exceeds term count {}",
                self.h.len()
            )));
        }
        let dim = self.dim();
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.h.terms()[..m] {
            for col in 0..dim {
                let (row, value) = term.op.column_action(col);
                matrix[(row, col)] += value * term.alpha;
            }
        }
        Ok(DenseOperator { matrix })
    }

    fn spectrum(&self) -> Result<&(DVector<f64>, DMatrix<Complex64>)> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let h = self.hamiltonian_matrix(self.h.len())?;
        let residual = h.hermiticity_residual();
        if residual > 1e-12 * self.h.lambda_total().max(1.0) {
            return Err(Error::NonHermitian { residual });
        }
        let eigen = h.into_matrix().symmetric_eigen();
        Ok(self.spectrum.get_or_init(|| (eigen.eigenvalues, eigen.eigenvectors)))
    }

    /// `exp(-iHt)` from the Hermitian eigendecomposition of the full `H`.
    pub fn exact_evolution(&self, t: f64) -> Result<DenseOperator> {
        let (values, vectors) = self.spectrum()?;
        let mut scaled = vectors.clone();
        for (j, &lambda) in values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        Ok(DenseOperator {
            matrix: scaled * vectors.adjoint(),
        })
    }

    /// `I + sum_k (-it)^k / k! H_1 H_2 ... H_k` with `H_j` the sum of the
    /// `L_j` largest terms; factors multiply left to right in `j`.
    pub fn truncated_series_operator(
        &self,
        levels: &TruncationVector,
        t: f64,
    ) -> Result<DenseOperator> {
        levels.validate(self.h)?;
        let dim = self.dim();
        let mut total = DMatrix::<Complex64>::identity(dim, dim);
        let mut product = DMatrix::<Complex64>::identity(dim, dim);
        let mut coef = Complex64::new(1.0, 0.0);
        for (i, &l) in levels.levels().iter().enumerate() {
            if l == 0 {
                break;
            }
            let k = (i + 1) as f64;
            coef *= Complex64::new(0.0, -t / k);
            product *= self.hamiltonian_matrix(l)?.matrix;
            total += &product * coef;
        }
        Ok(DenseOperator { matrix: total })
    }

    /// `(3 / s) U_L - (4 / s^3) U_L U_L^dag U_L` with `s = s_L(t)`.
    pub fn amplified_operator(&self, levels: &TruncationVector, t: f64) -> Result<DenseOperator> {
        let s = planner::s_value(self.h, levels, t)?;
        let u = self.truncated_series_operator(levels, t)?;
        Ok(amplify(&u, s))
    }

    /// Single-step error at `t_inf`, alongside its analytic bound.
    pub fn single_step_error(&self, levels: &TruncationVector) -> Result<ErrorReport> {
        self.multi_step_error(levels, 1).map(|mut report| {
            report.r_step.clear();
            report
        })
    }

    /// `||U(t_inf)^r - A_L(t_inf)^r||` for `r = 1..=steps`.
    pub fn multi_step_error(&self, levels: &TruncationVector, steps: usize) -> Result<ErrorReport> {
        if steps == 0 {
            return Err(Error::invalid("step count must be at least 1"));
        }
        let t = planner::t_infinity(self.h);
        let exact = self.exact_evolution(t)?;
        let applied = self.amplified_operator(levels, t)?;
        let mut exact_power = exact.clone();
        let mut applied_power = applied.clone();
        let mut r_step = Vec::with_capacity(steps);
        for r in 1..=steps {
            if r > 1 {
                exact_power = &exact_power * &exact;
                applied_power = &applied_power * &applied;
            }
            r_step.push(StepError {
                r,
                error: operator_norm(&(&exact_power - &applied_power))?,
            });
        }
        Ok(ErrorReport {
            levels: levels.clone(),
            cost: levels.cost(),
            epsilon: planner::epsilon_bound(self.h, levels)?,
            delta: r_step[0].error,
            r_step,
        })
    }
}

/// The polynomial `(3/s) U - (4/s^3) U U^dag U`.
pub fn amplify(u: &DenseOperator, s: f64) -> DenseOperator {
    let cubic = &(u * &u.adjoint()) * u;
    let a = u.scale(Complex64::from(3.0 / s));
    let b = cubic.scale(Complex64::from(4.0 / (s * s * s)));
    &a - &b
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::unusual_byte_groupings)]
mod tests {
    use std::f64::consts::{LN_2, PI};

    use super::*;
    use crate::hamiltonian::{from_weights, parse_hamiltonian};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
        (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_z_matrix() {
        let h = parse_hamiltonian("1.0 Z").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        let m = sim.hamiltonian_matrix(1).unwrap();
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert_eq!(m.get(1, 1), c(-1.0, 0.0));
        assert_eq!(m.get(0, 1), c(0.0, 0.0));
        assert_eq!(sim.hamiltonian_matrix(0).unwrap(), DenseOperator::zeros(2));
    }

    #[test]
    fn cap_is_enforced() {
        let h = parse_hamiltonian("1.0 ZZZ").unwrap();
        assert!(matches!(
            DenseSimulator::with_cap(&h, 2),
            Err(Error::CapExceeded { required: 3, cap: 2, .. })
        ));
    }

    #[test]
    fn evolution_of_z() {
        let h = parse_hamiltonian("1.0 Z").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        let u = sim.exact_evolution(PI).unwrap();
        let minus_identity = DenseOperator::identity(2).scale(c(-1.0, 0.0));
        assert!(max_abs_diff(&u, &minus_identity) < 1e-14);
        let u0 = sim.exact_evolution(0.0).unwrap();
        assert!(max_abs_diff(&u0, &DenseOperator::identity(2)) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = parse_hamiltonian("1.0 Z\n0.5i X").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        assert!(matches!(sim.exact_evolution(0.1), Err(Error::NonHermitian { .. })));
        // the series itself is still defined
        assert!(sim.truncated_series_operator(&vec![2].into(), 0.1).is_ok());
    }

    #[test]
    fn series_examples() {
        let h = parse_hamiltonian("1.0 Z").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        let u = sim.truncated_series_operator(&TruncationVector::zero(), 0.4).unwrap();
        assert_eq!(u, DenseOperator::identity(2));
        let t = 0.4;
        let u = sim.truncated_series_operator(&vec![1].into(), t).unwrap();
        assert!((u.get(0, 0) - c(1.0, -t)).norm() < 1e-15);
        assert!((u.get(1, 1) - c(1.0, t)).norm() < 1e-15);
    }

    #[test]
    fn amplified_examples() {
        let h = parse_hamiltonian("1.0 Z").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        // zero vector: s = 1, U_L = I
        let a = sim.amplified_operator(&TruncationVector::zero(), 0.3).unwrap();
        assert!(max_abs_diff(&a, &DenseOperator::identity(2).scale(c(-1.0, 0.0))) < 1e-15);

        // 2x2 closed form: A = c (I - itZ), c = 3/s - 4(1+t^2)/s^3, s = 1 + ln 2
        let t = LN_2;
        let s = 1.0 + t;
        let coef = 3.0 / s - 4.0 * (1.0 + t * t) / (s * s * s);
        assert!((coef - 0.5518183987948728).abs() < 1e-15);
        let a = sim.amplified_operator(&vec![1].into(), t).unwrap();
        assert!((a.get(0, 0) - c(coef, -coef * t)).norm() < 1e-14);
        assert!((a.get(1, 1) - c(coef, coef * t)).norm() < 1e-14);

        // unitary input with s = 2 is a fixed point
        let u = sim.exact_evolution(0.7).unwrap();
        assert!(max_abs_diff(&amplify(&u, 2.0), &u) < 1e-14);
    }

    #[test]
    fn norm_examples() {
        assert!((operator_norm(&DenseOperator::identity(8)).unwrap() - 1.0).abs() < 1e-14);
        assert!((power_iteration_norm(DenseOperator::identity(128).matrix()).unwrap() - 1.0).abs() < 1e-12);
        let d = DenseOperator::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(3.0, 0.0),
            c(0.0, -4.0),
        ])))
        .unwrap();
        assert!((d.norm().unwrap() - 4.0).abs() < 1e-14);
        assert!((power_iteration_norm(d.matrix()).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(power_iteration_norm(&DMatrix::zeros(4, 4)).unwrap(), 0.0);
    }

    #[test]
    fn single_step_examples() {
        let h = parse_hamiltonian("1.0 Z").unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        let report = sim.single_step_error(&vec![1].into()).unwrap();
        // |exp(-i ln2) - c (1 - i ln2)| from the closed form above
        assert!((report.delta - 0.33622684182542945).abs() < 1e-12);
        assert!((report.epsilon - 0.3068528194400547).abs() < 1e-15);
        assert!(report.delta <= report.epsilon + 2.0 * report.epsilon.powi(2));
        assert!(report.r_step.is_empty());

        let report = sim.single_step_error(&TruncationVector::zero()).unwrap();
        assert_eq!(report.epsilon, 1.0);
        assert!(report.delta <= 2.0 && report.delta >= 1.0);

        let uniform = from_weights(&[0.5; 3], 2).unwrap();
        let sim = DenseSimulator::with_cap(&uniform, 4).unwrap();
        let report = sim.single_step_error(&planner::full_order_levels(&uniform, 20)).unwrap();
        assert!(report.delta <= 1e-10, "{}", report.delta);
    }

    #[test]
    fn multi_step_first_entry_is_delta() {
        let h = from_weights(&[1.0, 0.1], 2).unwrap();
        let sim = DenseSimulator::with_cap(&h, 4).unwrap();
        let levels: TruncationVector = vec![2, 1].into();
        let single = sim.single_step_error(&levels).unwrap();
        let multi = sim.multi_step_error(&levels, 8).unwrap();
        assert_eq!(multi.r_step.len(), 8);
        assert_eq!(multi.r_step[0].error, single.delta);
        for step in &multi.r_step {
            let r = step.r as f64;
            assert!(step.error <= r * multi.delta * (1.0 + 10.0 * multi.delta));
        }
        assert!(sim.multi_step_error(&levels, 0).is_err());
    }
}

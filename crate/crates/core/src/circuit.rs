//! Operator-level model of the PREPARE / SELECT / amplification circuit.
//!
//! The ancilla is split into an order register `q` holding `kappa` qubits in
//! unary coding (`|k> = |1^k 0^(kappa-k)>`) and one index register `c_k` per
//! nonzero order with `ceil(log2 L_k)` qubits. Ancilla basis indices put `q`
//! in the most significant bits, followed by `c_1, ..., c_kappa`. Inside each
//! `c_k` the term index is stored little-endian: bit 0 of `l` sits on the
//! register's first qubit. The full space is `ancilla (x) system`, ancilla
//! major.
//!
//! Everything here is dense and meant for tiny instances; ancilla-times-system
//! dimension is capped at [`CIRCUIT_DIM_CAP`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densesim::{operator_norm, DenseOperator, DenseSimulator};
use crate::error::{Error, Result};
use crate::hamiltonian::SortedHamiltonian;
use crate::planner::{self, TruncationVector};

pub const CIRCUIT_DIM_CAP: usize = 1 << 10;

/// Register widths for one truncation vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaLayout {
    pub kappa: usize,
    pub c_widths: Vec<usize>,
    pub total_ancillas: usize,
    /// Scratch qubits for the multi-controlled reflection.
    pub reflection_ancillas: usize,
}

impl AncillaLayout {
    pub fn dimension(&self) -> usize {
        1 << self.total_ancillas
    }

    /// Bit offset of register `c_k` (1-based) from the least significant end.
    fn c_offset(&self, k: usize) -> usize {
        self.c_widths[k..].iter().sum()
    }

    fn q_offset(&self) -> usize {
        self.c_widths.iter().sum()
    }

    /// Ancilla index of `|k>_q |l_1>_c1 ... |l_kappa>_ckappa`.
    pub fn encode(&self, order: usize, indices: &[usize]) -> usize {
        let unary = ((1usize << order) - 1) << (self.kappa - order);
        let mut a = unary << self.q_offset();
        for (i, &l) in indices.iter().enumerate() {
            a |= reverse_bits(l, self.c_widths[i]) << self.c_offset(i + 1);
        }
        a
    }

    /// Whether qubit `m` (1-based) of the `q` register is set in ancilla state `a`.
    fn q_bit(&self, a: usize, m: usize) -> bool {
        (a >> (self.q_offset() + self.kappa - m)) & 1 == 1
    }

    /// Term index held by register `c_k` in ancilla state `a`.
    fn c_index(&self, a: usize, k: usize) -> usize {
        let w = self.c_widths[k - 1];
        let field = (a >> self.c_offset(k)) & ((1 << w) - 1);
        reverse_bits(field, w)
    }
}

fn reverse_bits(value: usize, width: usize) -> usize {
    (0..width).fold(0, |acc, b| acc | (((value >> b) & 1) << (width - 1 - b)))
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

pub fn layout_for(levels: &TruncationVector) -> Result<AncillaLayout> {
    if levels.kappa() == 0 {
        return Err(Error::NoActiveOrders);
    }
    if !levels.is_contiguous() {
        return Err(Error::invalid(format!(
            "circuit construction needs contiguous nonzero orders, got {levels}"
        )));
    }
    let kappa = levels.kappa();
    let c_widths: Vec<usize> = levels.levels().iter().map(|&l| ceil_log2(l)).collect();
    let total = kappa + c_widths.iter().sum::<usize>();
    Ok(AncillaLayout {
        kappa,
        c_widths,
        total_ancillas: total,
        reflection_ancillas: total.saturating_sub(2),
    })
}

/// Closed-form gate counts for one application of the amplified step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub layout: AncillaLayout,
    /// `||L||_1`, the cost proxy used for all comparisons.
    pub t_proxy: usize,
    /// Controlled rotations preparing the unary `q` register.
    pub prepare_rotations: usize,
    /// Number of coefficients loaded into each `c_k` register.
    pub prepare_state_sizes: Vec<usize>,
    /// Controlled `-i h_l` applications in one SELECT.
    pub select_ops: usize,
    pub reflection_ancillas: usize,
    pub walk_applications: usize,
    pub prepare_applications: usize,
    pub select_applications: usize,
    pub reflections: usize,
}

pub fn estimate_resources(levels: &TruncationVector) -> Result<ResourceEstimate> {
    let layout = layout_for(levels)?;
    // A = -W R W^dag R W: three walks, each with two PREPAREs and one SELECT
    let walks = 3;
    Ok(ResourceEstimate {
        t_proxy: levels.cost(),
        prepare_rotations: layout.kappa - 1,
        prepare_state_sizes: levels.levels().to_vec(),
        select_ops: levels.cost(),
        reflection_ancillas: layout.reflection_ancillas,
        walk_applications: walks,
        prepare_applications: 2 * walks,
        select_applications: walks,
        reflections: 2,
        layout,
    })
}

fn check_instance(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    with_system: bool,
) -> Result<AncillaLayout> {
    levels.validate(h)?;
    let layout = layout_for(levels)?;
    let required = if with_system {
        layout
            .total_ancillas
            .checked_add(h.qubit_count())
            .filter(|&q| q < usize::BITS as usize)
            .map_or(usize::MAX, |q| 1usize << q)
    } else {
        layout.dimension()
    };
    if required > CIRCUIT_DIM_CAP {
        return Err(Error::CapExceeded {
            what: if with_system {
                "ancilla x system dimension"
            } else {
                "ancilla dimension"
            },
            required,
            cap: CIRCUIT_DIM_CAP,
        });
    }
    Ok(layout)
}

/// Per-order weights `t^k / k! * Lambda_1 ... Lambda_k` loaded into `q`.
fn order_weights(h: &SortedHamiltonian, levels: &TruncationVector, t: f64) -> Result<Vec<f64>> {
    let mut weights = vec![1.0];
    let mut w = 1.0;
    for k in 1..=levels.kappa() {
        w = w * t / k as f64 * h.prefix_lambda(levels.level(k))?;
        weights.push(w);
    }
    Ok(weights)
}

/// Normalization `N_q` of the order-register state.
pub fn q_normalization(h: &SortedHamiltonian, levels: &TruncationVector, t: f64) -> Result<f64> {
    Ok(order_weights(h, levels, t)?.iter().sum())
}

/// Real orthogonal matrix whose first column is the unit vector `v`.
fn completion(v: &DVector<f64>) -> DMatrix<Complex64> {
    let n = v.len();
    let mut w = -v.clone();
    w[0] += 1.0;
    let wn = w.norm_squared();
    let mut m = DMatrix::<f64>::identity(n, n);
    if wn > 1e-30 {
        m -= (&w * w.transpose()) * (2.0 / wn);
    }
    m.map(|x| Complex64::new(x, 0.0))
}

/// PREPARE as a product of independent register preparations: `q` gets the
/// order weights in unary coding, each `c_k` gets amplitudes
/// `sqrt(alpha_l / Lambda_k)` for `l < L_k`.
pub fn build_prepare(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    t: f64,
) -> Result<DenseOperator> {
    let layout = check_instance(h, levels, false)?;
    let kappa = layout.kappa;

    let weights = order_weights(h, levels, t)?;
    let norm: f64 = weights.iter().sum();
    let mut q_state = DVector::<f64>::zeros(1 << kappa);
    for (k, w) in weights.iter().enumerate() {
        q_state[((1 << k) - 1) << (kappa - k)] = (w / norm).sqrt();
    }
    let mut prepare = completion(&q_state);

    for k in 1..=kappa {
        let width = layout.c_widths[k - 1];
        let lk = levels.level(k);
        let lambda_k = h.prefix_lambda(lk)?;
        let mut state = DVector::<f64>::zeros(1 << width);
        for (l, term) in h.terms()[..lk].iter().enumerate() {
            state[reverse_bits(l, width)] = (term.alpha / lambda_k).sqrt();
        }
        prepare = prepare.kronecker(&completion(&state));
    }
    DenseOperator::from_matrix(prepare)
}

/// Term unitaries `-i h_l` on the system, for `l < count`.
fn term_unitaries(h: &SortedHamiltonian, count: usize) -> Vec<DMatrix<Complex64>> {
    let dim = 1 << h.qubit_count();
    let minus_i = Complex64::new(0.0, -1.0);
    h.terms()[..count]
        .iter()
        .map(|term| {
            let mut m = DMatrix::zeros(dim, dim);
            for col in 0..dim {
                let (row, value) = term.op.column_action(col);
                m[(row, col)] = minus_i * value;
            }
            m
        })
        .collect()
}

/// SELECT restricted to each ancilla basis state: a `D x D` system block per
/// ancilla index. Group `m` is active when `q` qubit `m` is set, and applies
/// `-i h_l` with `l` read from `c_m`; indices `>= L_m` leave the group idle.
/// Active groups multiply left to right, `(-i h_{l_1}) (-i h_{l_2}) ...`.
fn select_blocks(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    layout: &AncillaLayout,
) -> Vec<DMatrix<Complex64>> {
    let dim = 1 << h.qubit_count();
    let max_level = levels.levels().iter().copied().max().unwrap_or(0);
    let unitaries = term_unitaries(h, max_level);
    (0..layout.dimension())
        .map(|a| {
            let mut block = DMatrix::<Complex64>::identity(dim, dim);
            for m in 1..=layout.kappa {
                if !layout.q_bit(a, m) {
                    continue;
                }
                let l = layout.c_index(a, m);
                if l < levels.level(m) {
                    block *= &unitaries[l];
                }
            }
            block
        })
        .collect()
}

pub fn build_select(h: &SortedHamiltonian, levels: &TruncationVector) -> Result<DenseOperator> {
    let layout = check_instance(h, levels, true)?;
    let blocks = select_blocks(h, levels, &layout);
    let d = 1 << h.qubit_count();
    let total = layout.dimension() * d;
    let mut m = DMatrix::<Complex64>::zeros(total, total);
    for (a, block) in blocks.iter().enumerate() {
        m.view_mut((a * d, a * d), (d, d)).copy_from(block);
    }
    DenseOperator::from_matrix(m)
}

/// PREPARE and SELECT in factored form, applied to thin blocks of columns.
struct Walk {
    prepare: DMatrix<Complex64>,
    blocks: Vec<DMatrix<Complex64>>,
    ancilla_dim: usize,
    system_dim: usize,
}

impl Walk {
    fn new(h: &SortedHamiltonian, levels: &TruncationVector, t: f64) -> Result<Self> {
        let layout = check_instance(h, levels, true)?;
        Ok(Self {
            prepare: build_prepare(h, levels, t)?.into_matrix(),
            blocks: select_blocks(h, levels, &layout),
            ancilla_dim: layout.dimension(),
            system_dim: 1 << h.qubit_count(),
        })
    }

    fn total_dim(&self) -> usize {
        self.ancilla_dim * self.system_dim
    }

    /// `(P (x) I) x`, or `(P^dag (x) I) x` when `adjoint`.
    fn apply_prepare(&self, x: &DMatrix<Complex64>, adjoint: bool) -> DMatrix<Complex64> {
        let d = self.system_dim;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for a in 0..self.ancilla_dim {
            for b in 0..self.ancilla_dim {
                let p = if adjoint {
                    self.prepare[(b, a)].conj()
                } else {
                    self.prepare[(a, b)]
                };
                if p == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = x.rows(b * d, d) * p;
                let mut dst = out.rows_mut(a * d, d);
                dst += src;
            }
        }
        out
    }

    fn apply_select(&self, x: &DMatrix<Complex64>, adjoint: bool) -> DMatrix<Complex64> {
        let d = self.system_dim;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (a, block) in self.blocks.iter().enumerate() {
            let rows = x.rows(a * d, d);
            let image = if adjoint {
                block.adjoint() * rows
            } else {
                block * rows
            };
            out.rows_mut(a * d, d).copy_from(&image);
        }
        out
    }

    /// `W x = (P^dag (x) I) S (P (x) I) x`; `W^dag` swaps in `S^dag`.
    fn apply_w(&self, x: &DMatrix<Complex64>, adjoint: bool) -> DMatrix<Complex64> {
        let prepared = self.apply_prepare(x, false);
        let selected = self.apply_select(&prepared, adjoint);
        self.apply_prepare(&selected, true)
    }

    /// `R = 2 Pi - 1`: keep ancilla-|0> rows, negate the rest.
    fn apply_reflection(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = -x;
        out.rows_mut(0, self.system_dim).neg_mut();
        out
    }

    /// `A x = -W R W^dag R W x`.
    fn apply_amplified(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let y = self.apply_w(x, false);
        let y = self.apply_reflection(&y);
        let y = self.apply_w(&y, true);
        let y = self.apply_reflection(&y);
        -self.apply_w(&y, false)
    }

    /// Columns `|0>_anc (x) |i>` for every system basis state `i`.
    fn ancilla_zero_columns(&self) -> DMatrix<Complex64> {
        let mut x = DMatrix::zeros(self.total_dim(), self.system_dim);
        for i in 0..self.system_dim {
            x[(i, i)] = Complex64::new(1.0, 0.0);
        }
        x
    }

    fn zero_block(&self, image: &DMatrix<Complex64>) -> DenseOperator {
        DenseOperator::from_matrix(image.rows(0, self.system_dim).into_owned())
            .expect("system dimension is a power of two")
    }
}

/// Dense walk `W`, reflection `R`, and amplified step `A = -W R W^dag R W`
/// on ancilla (x) system.
#[derive(Debug, Clone)]
pub struct WalkOperators {
    pub walk: DenseOperator,
    pub reflection: DenseOperator,
    pub amplified: DenseOperator,
}

pub fn build_walk_operators(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    t: f64,
) -> Result<WalkOperators> {
    let walk = Walk::new(h, levels, t)?;
    let n = walk.total_dim();
    let identity = DMatrix::<Complex64>::identity(n, n);
    let w = walk.apply_w(&identity, false);
    let reflection = walk.apply_reflection(&identity);
    let rw = walk.apply_reflection(&w);
    let inner = walk.apply_reflection(&(w.adjoint() * rw));
    let amplified = -(&w * inner);
    Ok(WalkOperators {
        walk: DenseOperator::from_matrix(w)?,
        reflection: DenseOperator::from_matrix(reflection)?,
        amplified: DenseOperator::from_matrix(amplified)?,
    })
}

/// Residuals of the block identities checked against independently built
/// dense operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub levels: TruncationVector,
    pub t: f64,
    pub s: f64,
    pub q_normalization: f64,
    /// `|N_q - s_L(t)|`
    pub normalization_residual: f64,
    /// `||<0| W |0> - U_L / s||`
    pub walk_block_residual: f64,
    /// `||<0| A |0> - A_L||`
    pub amplified_block_residual: f64,
    /// Largest deviation of `||W |0>|psi>||` from 1 over basis states.
    pub walk_column_norm_residual: f64,
}

impl IdentityResiduals {
    pub fn max_block_residual(&self) -> f64 {
        self.walk_block_residual.max(self.amplified_block_residual)
    }
}

pub fn verify_identities(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    t: f64,
) -> Result<IdentityResiduals> {
    let walk = Walk::new(h, levels, t)?;
    let sim = DenseSimulator::with_cap(h, h.qubit_count())?;
    let s = planner::s_value(h, levels, t)?;
    let q_norm = q_normalization(h, levels, t)?;

    let zero = walk.ancilla_zero_columns();
    let w_image = walk.apply_w(&zero, false);
    let a_image = walk.apply_amplified(&zero);

    let series = sim.truncated_series_operator(levels, t)?;
    let expected_w = series.scale(Complex64::from(1.0 / s));
    let expected_a = sim.amplified_operator(levels, t)?;

    let column_residual = w_image
        .column_iter()
        .map(|c| (c.norm() - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(IdentityResiduals {
        levels: levels.clone(),
        t,
        s,
        q_normalization: q_norm,
        normalization_residual: (q_norm - s).abs(),
        walk_block_residual: operator_norm(&(&walk.zero_block(&w_image) - &expected_w))?,
        amplified_block_residual: operator_norm(&(&walk.zero_block(&a_image) - &expected_a))?,
        walk_column_norm_residual: column_residual,
    })
}

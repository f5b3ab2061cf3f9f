//! Hamiltonians of the form `H = sum_l alpha_l h_l` with strictly positive
//! weights `alpha_l` and unitary Pauli-string operators `h_l`.
//!
//! Every Hamiltonian in this crate is a [`SortedHamiltonian`]: terms are kept
//! in descending order of weight, so the first `m` terms are always the `m`
//! largest ones and `prefix_lambda(m)` is their total weight.
//!
//! The text format read by [`parse_hamiltonian`] has one term per line,
//! `<coefficient> <pauli-string>`, where the coefficient is a decimal real or
//! an `a+bi` literal. `#` starts a comment and blank lines are skipped. A
//! coefficient's sign (or factor of `i`) is folded into the Pauli string's
//! phase so that the stored weight is its magnitude.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Coefficients with smaller magnitude are dropped while parsing.
pub const DROP_THRESHOLD: f64 = 1e-15;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// One of the four unit phases `+1, -1, +i, -i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Phase {
    #[default]
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Phase of a complex number lying on the real or imaginary axis.
    fn of(c: Complex64) -> Option<Self> {
        let tol = 1e-12 * c.norm();
        if c.im.abs() <= tol {
            Some(if c.re > 0.0 { Phase::PlusOne } else { Phase::MinusOne })
        } else if c.re.abs() <= tol {
            Some(if c.im > 0.0 { Phase::PlusI } else { Phase::MinusI })
        } else {
            None
        }
    }
}

/// A tensor product of single-qubit Paulis times a unit phase.
///
/// Character `q` of the string acts on qubit `q`; qubit 0 is the most
/// significant bit of a computational-basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>, phase: Phase) -> Self {
        Self { axes, phase }
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn qubit_count(&self) -> usize {
        self.axes.len()
    }

    /// True when the phased operator is Hermitian (phase is real).
    pub fn is_hermitian(&self) -> bool {
        matches!(self.phase, Phase::PlusOne | Phase::MinusOne)
    }

    /// Image of basis state `col`: the operator maps `|col>` to `value |row>`.
    pub fn column_action(&self, col: usize) -> (usize, Complex64) {
        let n = self.axes.len();
        let mut row = col;
        let mut value = self.phase.to_complex();
        for (q, axis) in self.axes.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (col >> shift) & 1;
            match axis {
                Pauli::I => {}
                Pauli::X => row ^= 1 << shift,
                Pauli::Y => {
                    row ^= 1 << shift;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    value *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                Pauli::Z => {
                    if bit == 1 {
                        value = -value;
                    }
                }
            }
        }
        (row, value)
    }

    /// The axes as a plain `IXYZ` string, without the phase.
    pub fn label(&self) -> String {
        self.axes.iter().map(|p| p.as_char()).collect()
    }
}

impl FromStr for PauliString {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.is_empty() {
            return Err("empty Pauli string".into());
        }
        let axes = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| format!("invalid Pauli character {c:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(PauliString::new(axes, Phase::PlusOne))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub alpha: f64,
    pub op: PauliString,
}

impl HamiltonianTerm {
    /// Signed coefficient `phase * alpha` in front of the bare Pauli string.
    pub fn coefficient(&self) -> Complex64 {
        self.op.phase().to_complex() * self.alpha
    }
}

/// Positive-weight Pauli Hamiltonian with terms sorted by descending weight.
#[derive(Debug, Clone)]
pub struct SortedHamiltonian {
    label: String,
    qubit_count: usize,
    terms: Vec<HamiltonianTerm>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl SortedHamiltonian {
    /// Sorts `terms` (stable, descending by weight) and computes prefix sums.
    pub fn from_terms(qubit_count: usize, mut terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::invalid("qubit count must be positive"));
        }
        if terms.is_empty() {
            return Err(Error::Empty);
        }
        for (i, term) in terms.iter().enumerate() {
            if term.op.qubit_count() != qubit_count {
                return Err(Error::InconsistentLength {
                    line: i + 1,
                    expected: qubit_count,
                    found: term.op.qubit_count(),
                });
            }
            if !(term.alpha > 0.0 && term.alpha.is_finite()) {
                return Err(Error::invalid(format!(
                    "term {i} has non-positive or non-finite weight {}",
                    term.alpha
                )));
            }
        }
        terms.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));

        let mut prefix = Vec::with_capacity(terms.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for t in &terms {
            acc += t.alpha;
            prefix.push(acc);
        }
        // tail sums accumulate from the smallest term up
        let mut suffix = vec![0.0; terms.len() + 1];
        for m in (0..terms.len()).rev() {
            suffix[m] = suffix[m + 1] + terms[m].alpha;
        }

        Ok(Self {
            label: "hamiltonian".to_string(),
            qubit_count,
            terms,
            prefix,
            suffix,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Number of terms `L`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total weight `Lambda`.
    pub fn lambda_total(&self) -> f64 {
        self.prefix[self.terms.len()]
    }

    /// Total weight of the `m` largest terms.
    pub fn prefix_lambda(&self, m: usize) -> Result<f64> {
        self.prefix.get(m).copied().ok_or_else(|| {
            Error::invalid(format!("prefix length {m} exceeds term count {}", self.len()))
        })
    }

    /// Total weight of the terms with index `>= m`, i.e. `Lambda - prefix_lambda(m)`
    /// without the cancellation.
    pub fn tail_lambda(&self, m: usize) -> Result<f64> {
        self.suffix.get(m).copied().ok_or_else(|| {
            Error::invalid(format!("prefix length {m} exceeds term count {}", self.len()))
        })
    }

    /// Renders the Hamiltonian in the term-list text format.
    pub fn to_term_list(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            let a = term.alpha;
            let coeff = match term.op.phase() {
                Phase::PlusOne => format!("{a}"),
                Phase::MinusOne => format!("-{a}"),
                Phase::PlusI => format!("0+{a}i"),
                Phase::MinusI => format!("0-{a}i"),
            };
            out.push_str(&coeff);
            out.push(' ');
            out.push_str(&term.op.label());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for SortedHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} qubits, L = {}, Lambda = {})",
            self.label,
            self.qubit_count,
            self.len(),
            self.lambda_total()
        )
    }
}

/// Parses a real (`-0.5`, `1e-3`) or complex (`0.1+0.2i`, `-3i`) literal.
fn parse_coefficient(s: &str) -> Option<Complex64> {
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (body[..p].parse::<f64>().ok()?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}

/// Reads a term list. Terms with `|coefficient| < 1e-15` are dropped.
pub fn parse_hamiltonian(text: &str) -> Result<SortedHamiltonian> {
    let mut terms = Vec::new();
    let mut qubits: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(coeff), Some(string), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!(
                "expected `<coefficient> <pauli-string>`, got {line:?}"
            )));
        };
        let c = parse_coefficient(coeff)
            .filter(|c| c.re.is_finite() && c.im.is_finite())
            .ok_or_else(|| parse_err(format!("invalid coefficient {coeff:?}")))?;
        let op: PauliString = string.parse().map_err(parse_err)?;
        match qubits {
            None => qubits = Some(op.qubit_count()),
            Some(n) if n != op.qubit_count() => {
                return Err(Error::InconsistentLength {
                    line: line_no,
                    expected: n,
                    found: op.qubit_count(),
                })
            }
            Some(_) => {}
        }
        let alpha = c.norm();
        if alpha < DROP_THRESHOLD {
            log::warn!("line {line_no}: dropping term {string} with negligible coefficient {coeff}");
            continue;
        }
        let phase = Phase::of(c).ok_or_else(|| {
            parse_err(format!(
                "coefficient {coeff} has a phase other than +1, -1, +i or -i"
            ))
        })?;
        terms.push(HamiltonianTerm {
            alpha,
            op: PauliString::new(op.axes, phase),
        });
    }
    let qubits = qubits.ok_or(Error::Empty)?;
    SortedHamiltonian::from_terms(qubits, terms)
}

/// Same Pauli strings as `template`, weights replaced by `|N(mu, sigma)|` draws.
pub fn random_hamiltonian(
    template: &SortedHamiltonian,
    mu: f64,
    sigma: f64,
    seed: u64,
) -> Result<SortedHamiltonian> {
    let normal = Normal::new(mu, sigma)
        .map_err(|e| Error::invalid(format!("normal distribution ({mu}, {sigma}): {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<_> = template
        .terms()
        .iter()
        .filter_map(|t| {
            let alpha = normal.sample(&mut rng).abs();
            (alpha >= DROP_THRESHOLD).then(|| HamiltonianTerm {
                alpha,
                op: t.op.clone(),
            })
        })
        .collect();
    Ok(SortedHamiltonian::from_terms(template.qubit_count(), terms)?
        .with_label(format!("{}-random-{seed}", template.label())))
}

/// Synthetic Hamiltonian whose weights fall off geometrically over `decades`
/// orders of magnitude: `alpha_l = 10^(-decades * l / (L - 1))`, attached to
/// distinct random Pauli strings.
pub fn logspread_hamiltonian(
    terms: usize,
    decades: f64,
    qubit_count: usize,
    seed: u64,
) -> Result<SortedHamiltonian> {
    if terms == 0 {
        return Err(Error::invalid("term count must be at least 1"));
    }
    if !(decades >= 0.0 && decades.is_finite()) {
        return Err(Error::invalid(format!("decades must be >= 0, got {decades}")));
    }
    if qubit_count == 0 || (qubit_count < 32 && terms as u64 > 4u64.pow(qubit_count as u32)) {
        return Err(Error::invalid(format!(
            "{qubit_count} qubits cannot hold {terms} distinct Pauli strings"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(terms);
    let mut out = Vec::with_capacity(terms);
    const AXES: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for l in 0..terms {
        let axes = loop {
            let candidate: Vec<Pauli> = (0..qubit_count)
                .map(|_| AXES[rng.random_range(0..4)])
                .collect();
            if seen.insert(candidate.clone()) {
                break candidate;
            }
        };
        let alpha = if terms == 1 {
            1.0
        } else {
            10f64.powf(-decades * l as f64 / (terms - 1) as f64)
        };
        out.push(HamiltonianTerm {
            alpha,
            op: PauliString::new(axes, Phase::PlusOne),
        });
    }
    Ok(SortedHamiltonian::from_terms(qubit_count, out)?
        .with_label(format!("logspread-{terms}-{decades}-{seed}")))
}

/// Hamiltonian with the given weights attached to distinct non-identity Pauli
/// strings, enumerated in a fixed order. Mostly useful for tests and examples.
pub fn from_weights(weights: &[f64], qubit_count: usize) -> Result<SortedHamiltonian> {
    let mut labels = Vec::with_capacity(weights.len());
    let mut idx = 0usize;
    while labels.len() < weights.len() {
        let axes: Vec<Pauli> = (0..qubit_count)
            .map(|q| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][(idx >> (2 * q)) & 3])
            .collect();
        idx += 1;
        if idx > 1 << (2 * qubit_count.min(16)) {
            return Err(Error::invalid(format!(
                "{qubit_count} qubits cannot hold {} distinct Pauli strings",
                weights.len()
            )));
        }
        // skip the identity so every term is traceless
        if axes.iter().all(|&p| p == Pauli::I) {
            continue;
        }
        labels.push(axes);
    }
    let terms = weights
        .iter()
        .zip(labels)
        .map(|(&alpha, axes)| HamiltonianTerm {
            alpha,
            op: PauliString::new(axes, Phase::PlusOne),
        })
        .collect();
    SortedHamiltonian::from_terms(qubit_count, terms)
}

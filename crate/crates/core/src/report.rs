//! Comparison of full-order truncation against greedy plans at equal cost,
//! and the CSV/JSON writers for every report type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::IdentityResiduals;
use crate::densesim::{DenseSimulator, ErrorReport};
use crate::error::{Error, Result};
use crate::hamiltonian::SortedHamiltonian;
use crate::planner::{self, PlanTrace, StopRule, TruncationVector};

/// One full order `n` against the greedy plan of the same cost `n L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub cost: usize,
    #[serde(rename = "eps_full")]
    pub epsilon_full: f64,
    #[serde(rename = "eps_greedy")]
    pub epsilon_greedy: f64,
    /// `eps_full / eps_greedy`
    pub bound_ratio: f64,
    pub delta_full: Option<f64>,
    pub delta_greedy: Option<f64>,
    pub delta_ratio: Option<f64>,
    /// `(n L - C) / L` where `C` is the smallest greedy cost whose bound is at
    /// most `eps_full`; absent when the greedy trace never gets there.
    #[serde(rename = "cost_saving_in_orders")]
    pub cost_saving: Option<f64>,
}

const COMPARISON_HEADER: [&str; 9] = [
    "n",
    "cost",
    "eps_full",
    "eps_greedy",
    "bound_ratio",
    "delta_full",
    "delta_greedy",
    "delta_ratio",
    "cost_saving_in_orders",
];

/// Rows for `n = 1..=max_order`. The greedy plan is built once up to cost
/// `max_order * L` and read off at each prefix. Measured errors are filled in
/// when a simulator is supplied.
pub fn generate_comparison_report(
    h: &SortedHamiltonian,
    max_order: usize,
    dense: Option<&DenseSimulator<'_>>,
) -> Result<Vec<ComparisonRow>> {
    if max_order == 0 {
        return Err(Error::invalid("maximum order must be at least 1"));
    }
    let terms = h.len();
    let trace = planner::greedy_plan(h, StopRule::Budget(max_order * terms))?;
    (1..=max_order)
        .map(|n| {
            let cost = n * terms;
            let full = planner::full_order_levels(h, n);
            let epsilon_full = planner::epsilon_bound(h, &full)?;
            let epsilon_greedy = trace
                .epsilon_at_cost(cost)
                .expect("trace reaches max_order * L");
            let cost_saving = trace
                .cost_to_reach(epsilon_full)
                .map(|c| (cost as f64 - c as f64) / terms as f64);

            let (delta_full, delta_greedy, delta_ratio) = match dense {
                Some(sim) => {
                    let df = sim.single_step_error(&full)?.delta;
                    let dg = sim.single_step_error(&trace.levels_at_cost(cost)?)?.delta;
                    (Some(df), Some(dg), Some(df / dg))
                }
                None => (None, None, None),
            };

            Ok(ComparisonRow {
                n,
                cost,
                epsilon_full,
                epsilon_greedy,
                bound_ratio: epsilon_full / epsilon_greedy,
                delta_full,
                delta_greedy,
                delta_ratio,
                cost_saving,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.csv` or `.json`, case-insensitive.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            _ => Err(Error::invalid(format!(
                "cannot infer output format from {}; use .csv or .json",
                path.display()
            ))),
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn csv_bytes<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))
}

pub fn serialize_report(rows: &[ComparisonRow], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(rows),
        Format::Csv => csv_bytes(&COMPARISON_HEADER, rows),
    }
}

pub fn parse_report(bytes: &[u8], format: Format) -> Result<Vec<ComparisonRow>> {
    match format {
        Format::Json => Ok(serde_json::from_slice(bytes)?),
        Format::Csv => csv::Reader::from_reader(bytes)
            .deserialize()
            .map(|r| r.map_err(Error::from))
            .collect(),
    }
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    k: usize,
    gain: f64,
    epsilon: f64,
    cost: usize,
}

/// Plan trace as JSON, or CSV with one `step,k,gain,epsilon,cost` row per insertion.
pub fn serialize_trace(trace: &PlanTrace, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(trace),
        Format::Csv => csv_bytes(
            &["step", "k", "gain", "epsilon", "cost"],
            trace.steps.iter().enumerate().map(|(i, s)| TraceRow {
                step: i + 1,
                k: s.order,
                gain: s.gain,
                epsilon: s.epsilon_after,
                cost: s.cost_after,
            }),
        ),
    }
}

fn levels_cell(levels: &TruncationVector) -> String {
    levels
        .levels()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Serialize)]
struct ErrorRow {
    levels: String,
    cost: usize,
    epsilon: f64,
    delta: f64,
    r: usize,
    r_step_error: f64,
}

/// Error report as JSON, or CSV with one row per step count `r`.
pub fn serialize_error_report(report: &ErrorReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let steps: Vec<(usize, f64)> = if report.r_step.is_empty() {
                vec![(1, report.delta)]
            } else {
                report.r_step.iter().map(|s| (s.r, s.error)).collect()
            };
            csv_bytes(
                &["levels", "cost", "epsilon", "delta", "r", "r_step_error"],
                steps.into_iter().map(|(r, e)| ErrorRow {
                    levels: levels_cell(&report.levels),
                    cost: report.cost,
                    epsilon: report.epsilon,
                    delta: report.delta,
                    r,
                    r_step_error: e,
                }),
            )
        }
    }
}

#[derive(Serialize)]
struct ResidualRow {
    levels: String,
    t: f64,
    s: f64,
    q_normalization: f64,
    normalization_residual: f64,
    walk_block_residual: f64,
    amplified_block_residual: f64,
    walk_column_norm_residual: f64,
}

pub fn serialize_residuals(rows: &[IdentityResiduals], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(rows),
        Format::Csv => csv_bytes(
            &[
                "levels",
                "t",
                "s",
                "q_normalization",
                "normalization_residual",
                "walk_block_residual",
                "amplified_block_residual",
                "walk_column_norm_residual",
            ],
            rows.iter().map(|r| ResidualRow {
                levels: levels_cell(&r.levels),
                t: r.t,
                s: r.s,
                q_normalization: r.q_normalization,
                normalization_residual: r.normalization_residual,
                walk_block_residual: r.walk_block_residual,
                amplified_block_residual: r.amplified_block_residual,
                walk_column_norm_residual: r.walk_column_norm_residual,
            }),
        ),
    }
}

/// Analytic quantities for one truncation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub hamiltonian: String,
    pub levels: TruncationVector,
    pub kappa: usize,
    pub cost: usize,
    pub t_infinity: f64,
    pub s_at_t_infinity: f64,
    pub epsilon: f64,
    /// Root of `s(t) = 2`; absent for the zero vector.
    pub t_root: Option<f64>,
    pub epsilon_at_root_step: Option<f64>,
}

pub fn bound_summary(h: &SortedHamiltonian, levels: &TruncationVector) -> Result<BoundSummary> {
    let t_inf = planner::t_infinity(h);
    let (t_root, eps_root) = if levels.active_orders() == 0 {
        (None, None)
    } else {
        (
            Some(planner::solve_t_root(h, levels)?),
            Some(planner::epsilon_at_root_step(h, levels)?),
        )
    };
    Ok(BoundSummary {
        hamiltonian: h.label().to_string(),
        levels: levels.clone(),
        kappa: levels.kappa(),
        cost: levels.cost(),
        t_infinity: t_inf,
        s_at_t_infinity: planner::s_value(h, levels, t_inf)?,
        epsilon: planner::epsilon_bound(h, levels)?,
        t_root,
        epsilon_at_root_step: eps_root,
    })
}

#[derive(Serialize)]
struct BoundRow<'a> {
    hamiltonian: &'a str,
    levels: String,
    kappa: usize,
    cost: usize,
    t_infinity: f64,
    s_at_t_infinity: f64,
    epsilon: f64,
    t_root: Option<f64>,
    epsilon_at_root_step: Option<f64>,
}

pub fn serialize_bound(summary: &BoundSummary, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(summary),
        Format::Csv => csv_bytes(
            &[
                "hamiltonian",
                "levels",
                "kappa",
                "cost",
                "t_infinity",
                "s_at_t_infinity",
                "epsilon",
                "t_root",
                "epsilon_at_root_step",
            ],
            [BoundRow {
                hamiltonian: &summary.hamiltonian,
                levels: levels_cell(&summary.levels),
                kappa: summary.kappa,
                cost: summary.cost,
                t_infinity: summary.t_infinity,
                s_at_t_infinity: summary.s_at_t_infinity,
                epsilon: summary.epsilon,
                t_root: summary.t_root,
                epsilon_at_root_step: summary.epsilon_at_root_step,
            }],
        ),
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::unusual_byte_groupings)]
mod tests {
    use super::*;
    use crate::hamiltonian::from_weights;

    fn sample_row() -> ComparisonRow {
        ComparisonRow {
            n: 1,
            cost: 2,
            epsilon_full: 0.30685281944005469,
            epsilon_greedy: 0.17133189621897475,
            bound_ratio: 1.7909678838085346,
            delta_full: None,
            delta_greedy: None,
            delta_ratio: None,
            cost_saving: Some(0.5),
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let bytes = serialize_report(&[], Format::Csv).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "n,cost,eps_full,eps_greedy,bound_ratio,delta_full,delta_greedy,delta_ratio,cost_saving_in_orders\n"
        );
    }

    #[test]
    fn one_row_csv() {
        let text = String::from_utf8(serialize_report(&[sample_row()], Format::Csv).unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "1,2,0.3068528194400547,0.17133189621897474,1.7909678838085346,,,,0.5");
    }

    #[test]
    fn round_trips() {
        let rows = vec![sample_row(), ComparisonRow { delta_full: Some(0.25), delta_greedy: Some(0.125), delta_ratio: Some(2.0), cost_saving: None, ..sample_row() }];
        for format in [Format::Csv, Format::Json] {
            let back = parse_report(&serialize_report(&rows, format).unwrap(), format).unwrap();
            assert_eq!(back, rows);
        }
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.CSV")).unwrap(), Format::Csv);
        assert_eq!(Format::from_path(Path::new("x.json")).unwrap(), Format::Json);
        assert!(Format::from_path(Path::new("x.txt")).is_err());
    }

    #[test]
    fn two_term_comparison() {
        let h = from_weights(&[1.0, 0.1], 1).unwrap();
        let rows = generate_comparison_report(&h, 3, None).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[0].epsilon_full - 0.3068528194400546906).abs() < 1e-15);
        assert!((rows[0].epsilon_greedy - 0.1713318962189747498).abs() < 1e-15);
        assert!(rows[0].bound_ratio > 1.0);
        assert!(rows.windows(2).all(|w| w[0].cost < w[1].cost));
        assert!(rows[0].delta_full.is_none());
    }

    #[test]
    fn trace_csv_columns() {
        let h = from_weights(&[1.0, 0.1], 1).unwrap();
        let trace = planner::greedy_plan(&h, StopRule::Budget(3)).unwrap();
        let text = String::from_utf8(serialize_trace(&trace, Format::Csv).unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "step,k,gain,epsilon,cost");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("3,1,"));
    }

    #[test]
    fn bound_summary_zero_vector() {
        let h = from_weights(&[1.0, 0.1], 1).unwrap();
        let s = bound_summary(&h, &TruncationVector::zero()).unwrap();
        assert_eq!(s.epsilon, 1.0);
        assert!(s.t_root.is_none());
        let s = bound_summary(&h, &vec![2, 1].into()).unwrap();
        assert!((s.t_root.unwrap() - 0.6787441193290352).abs() < 1e-12);
        let csv = serialize_bound(&s, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 2);
    }
}

//! Comparison report for a Hamiltonian with weights spread over three
//! decades, written as CSV to stdout. Pass `--dense` to add measured errors.

use taylor_lcu::densesim::DenseSimulator;
use taylor_lcu::hamiltonian::logspread_hamiltonian;
use taylor_lcu::report::{generate_comparison_report, serialize_report, Format};

fn main() -> taylor_lcu::Result<()> {
    let dense = std::env::args().any(|a| a == "--dense");
    let h = logspread_hamiltonian(32, 3.0, 5, 0)?;
    let sim = if dense { Some(DenseSimulator::new(&h)?) } else { None };
    let rows = generate_comparison_report(&h, 6, sim.as_ref())?;
    print!("{}", String::from_utf8_lossy(&serialize_report(&rows, Format::Csv)?));
    Ok(())
}

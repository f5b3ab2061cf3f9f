//! Parse a term list, show the sorted weights and the prefix sums used by
//! the planner.
//!
//! cargo run --example parse_hamiltonian -- [PATH]

use std::path::PathBuf;

use taylor_lcu::cli::load_hamiltonian;

fn main() -> taylor_lcu::Result<()> {
    let path = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/h2_sto3g.txt")
    });
    let h = load_hamiltonian(&path)?;
    println!("{}: {} terms on {} qubits, Lambda = {:.8}", h.label(), h.len(), h.qubit_count(), h.lambda_total());
    for (m, term) in h.terms().iter().enumerate() {
        println!(
            "{:>3}  {:<12} alpha = {:.8}  prefix = {:.8}",
            m + 1,
            term.op.label(),
            term.alpha,
            h.prefix_lambda(m + 1)?
        );
    }
    Ok(())
}

//! Measured operator-norm error of the amplified truncated series against
//! exp(-iHt), for a single step and for repeated steps.

use std::path::PathBuf;

use taylor_lcu::cli::load_hamiltonian;
use taylor_lcu::densesim::DenseSimulator;
use taylor_lcu::planner::{greedy_plan, StopRule};

fn main() -> taylor_lcu::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/transverse_ising_4.txt");
    let h = load_hamiltonian(&path)?;
    let sim = DenseSimulator::new(&h)?;
    let trace = greedy_plan(&h, StopRule::Budget(4 * h.len()))?;
    for cost in [h.len(), 2 * h.len(), 3 * h.len()] {
        let levels = trace.levels_at_cost(cost)?;
        let report = sim.multi_step_error(&levels, 4)?;
        println!("L = {levels}  epsilon = {:.3e}  delta = {:.3e}", report.epsilon, report.delta);
        for step in &report.r_step {
            println!("    r = {}  ||U^r - A^r|| = {:.3e}", step.r, step.error);
        }
    }
    Ok(())
}

//! Greedy truncation on the two-term Hamiltonian {1.0, 0.1}: every step adds
//! the term with the largest gain in s(t_inf).

use taylor_lcu::hamiltonian::from_weights;
use taylor_lcu::planner::{greedy_plan, StopRule};

fn main() -> taylor_lcu::Result<()> {
    let h = from_weights(&[1.0, 0.1], 1)?;
    let trace = greedy_plan(&h, StopRule::Budget(6))?;
    println!("t_inf = {:.6}", trace.t);
    println!("step  k  gain        epsilon     cost");
    for (i, step) in trace.steps.iter().enumerate() {
        println!(
            "{:>4} {:>2}  {:.8}  {:.8}  {}",
            i + 1,
            step.order,
            step.gain,
            step.epsilon_after,
            step.cost_after
        );
    }
    println!("final L = {}", trace.final_levels);

    let target = greedy_plan(&h, StopRule::TargetEpsilon(1e-6))?;
    println!("epsilon <= 1e-6 needs cost {} with L = {}", target.final_levels.cost(), target.final_levels);
    Ok(())
}

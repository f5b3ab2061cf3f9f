//! Analytic bounds for full orders against the greedy vector of equal cost,
//! plus the root step size t_L where s_L(t_L) = 2.

use taylor_lcu::hamiltonian::logspread_hamiltonian;
use taylor_lcu::planner::{self, greedy_plan, StopRule};

fn main() -> taylor_lcu::Result<()> {
    let h = logspread_hamiltonian(32, 3.0, 6, 7)?;
    let terms = h.len();
    let trace = greedy_plan(&h, StopRule::Budget(6 * terms))?;
    println!(" n  eps_full      eps_greedy    ratio   t_L/t_inf");
    for n in 1..=6 {
        let full = planner::full_order_levels(&h, n);
        let greedy = trace.levels_at_cost(n * terms)?;
        let eps_full = planner::epsilon_bound(&h, &full)?;
        let eps_greedy = planner::epsilon_bound(&h, &greedy)?;
        let t_ratio = planner::solve_t_root(&h, &greedy)? / planner::t_infinity(&h);
        println!(
            "{n:>2}  {eps_full:.6e}  {eps_greedy:.6e}  {:>6.3}  {t_ratio:.6}",
            eps_full / eps_greedy
        );
    }
    Ok(())
}

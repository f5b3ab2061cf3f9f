//! Ancilla layout and gate-count proxies for a few truncation vectors.

use taylor_lcu::circuit::estimate_resources;
use taylor_lcu::planner::TruncationVector;

fn main() -> taylor_lcu::Result<()> {
    for levels in [vec![32, 32], vec![32, 20, 9, 3], vec![630, 630, 630], vec![630, 410, 150, 40, 7]] {
        let levels = TruncationVector::new(levels);
        let r = estimate_resources(&levels)?;
        println!(
            "L = {levels}: ancillas {} (q {} + c {:?}), SELECT ops {}, T proxy {}, PREPARE rotations {}",
            r.layout.total_ancillas,
            r.layout.kappa,
            r.layout.c_widths,
            r.select_ops,
            r.t_proxy,
            r.prepare_rotations
        );
    }
    Ok(())
}

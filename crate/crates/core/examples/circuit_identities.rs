//! Build PREPARE, SELECT and the walk operator explicitly and check their
//! ancilla-zero blocks against the dense truncated series.

use taylor_lcu::circuit::{build_walk_operators, layout_for, verify_identities};
use taylor_lcu::hamiltonian::from_weights;
use taylor_lcu::planner::{t_infinity, TruncationVector};

fn main() -> taylor_lcu::Result<()> {
    let h = from_weights(&[1.0, 0.6, 0.3, 0.1], 2)?;
    let t = t_infinity(&h);
    for levels in [vec![4], vec![2, 1], vec![4, 2, 1], vec![3, 3, 2]] {
        let levels = TruncationVector::new(levels);
        let layout = layout_for(&levels)?;
        let r = verify_identities(&h, &levels, t)?;
        println!(
            "L = {levels:<10} ancillas = {}  s = {:.6}  |N_q - s| = {:.1e}  W block = {:.1e}  A block = {:.1e}",
            layout.total_ancillas,
            r.s,
            r.normalization_residual,
            r.walk_block_residual,
            r.amplified_block_residual
        );
    }

    let ops = build_walk_operators(&h, &TruncationVector::new(vec![2, 1]), t)?;
    let w = ops.walk.matrix();
    let unitarity = (w.adjoint() * w - nalgebra::DMatrix::identity(w.nrows(), w.ncols())).norm();
    println!("W is {0}x{0}, ||W^dag W - I||_F = {unitarity:.1e}", w.nrows());
    Ok(())
}

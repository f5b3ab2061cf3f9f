//! Seeded generators: random weights on a fixed set of Pauli strings, and
//! synthetic log-spread Hamiltonians. Same seed, same output.

use std::path::PathBuf;

use taylor_lcu::cli::load_hamiltonian;
use taylor_lcu::hamiltonian::{logspread_hamiltonian, random_hamiltonian};

fn main() -> taylor_lcu::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/transverse_ising_4.txt");
    let template = load_hamiltonian(&path)?;
    let a = random_hamiltonian(&template, 1.0, 0.5, 11)?;
    let b = random_hamiltonian(&template, 1.0, 0.5, 11)?;
    assert_eq!(a.to_term_list(), b.to_term_list());
    print!("# {}\n{}", a.label(), a.to_term_list());

    let spread = logspread_hamiltonian(8, 4.0, 3, 2)?;
    print!("# {}\n{}", spread.label(), spread.to_term_list());
    Ok(())
}

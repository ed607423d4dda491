//! Fixtures shared by the criterion benches in `benches/`.

use ort_core::rank2::{cat_mixture, Rank2State};
use ort_core::roof::{LinearProgram, RoofProblem, Sense};

/// Rank-2 cat mixture inside the under-squeezed interval.
pub fn cat_state() -> Rank2State {
    cat_mixture(0.5, 0.4, 0.6).expect("valid parameters")
}

/// Three Fock levels (0.4, 0.4, 0.2) with coherences (0.2, 0.6, 0).
pub fn valley_problem() -> RoofProblem {
    RoofProblem::fock3([0.4, 0.4, 0.2], [0.2, 0.6, 0.0], 0).expect("valid parameters")
}

/// Dense random-looking LP with `rows` equality rows and `cols` columns,
/// feasible by construction (b is a positive combination of the columns).
pub fn dense_lp(rows: usize, cols: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(rows, vec![0.0; rows], vec![Sense::Eq; rows]);
    let mut state = 0x2545_f491_4f6c_dd1d_u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut b = vec![0.0; rows];
    for j in 0..cols {
        let col: Vec<f64> = (0..rows).map(|_| next()).collect();
        if j % 7 == 0 {
            b.iter_mut().zip(&col).for_each(|(bi, c)| *bi += c / (cols / 7 + 1) as f64);
        }
        lp.push_column(&col, next() - 0.5);
    }
    lp.b = b;
    lp
}

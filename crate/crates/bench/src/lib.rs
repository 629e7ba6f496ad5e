//! Fixtures shared by the kernel benchmarks.

use qrep_core::constructions::{coprime_pseudoregulus_sum, parse_blocks, polynomial_pair};
use qrep_core::subspaces::Subspace;
use qrep_core::codes::QSystem;
use qrep_core::{Elt, FieldTower, Mat, Result};

/// A deterministic dense matrix over the extension field of `t`.
pub fn dense_matrix(t: &FieldTower, rows: usize, cols: usize) -> Mat {
    let order = t.ext().order();
    let data: Vec<Vec<Elt>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| Elt(((i * cols + j) as u64 + 1).wrapping_mul(0x9E37_79B9) % order))
                .collect()
        })
        .collect();
    Mat::from_rows(cols, &data)
}

/// The coprime pseudoregulus sum on the given `n:k:m` blocks over F_2.
pub fn block_system(blocks: &str) -> Result<QSystem> {
    coprime_pseudoregulus_sum(2, &parse_blocks(blocks)?)
}

/// A Sidon pair of dimensions (n1, n2) over F_(2^m).
pub fn sidon_pair(m: usize, n1: usize, n2: usize) -> Result<(FieldTower, Subspace, Subspace)> {
    let t = FieldTower::new(2, 1, m)?;
    let (a, b) = polynomial_pair(&t, n1, n2)?;
    Ok((t, a, b))
}

//! Finite field tower F_p ⊆ F_q ⊆ F_(q^m).

mod gf;
pub(crate) mod poly;
mod tower;

pub use gf::{Elt, GaloisField};
pub use tower::{ArithOp, FieldSpec, FieldTower};

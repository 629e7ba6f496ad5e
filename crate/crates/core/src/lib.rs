pub mod error;
pub mod fields;
pub mod jobs;
pub mod budget;
pub mod codes;
pub mod constructions;
pub mod evasive;
pub mod linalg;
pub mod qmatroid;
pub mod subspaces;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{ArithOp, Elt, FieldSpec, FieldTower, GaloisField};
pub use linalg::Mat;

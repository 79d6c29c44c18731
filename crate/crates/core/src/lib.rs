pub mod linalg;
pub mod finite;
pub mod poly;
pub mod sequence;
pub mod algebra;
pub mod cli;
pub mod verify;

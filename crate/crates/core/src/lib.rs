pub mod coherent;
pub mod construct;
pub mod graph;
pub mod lbcs;
pub mod linalg;
pub mod qcert;
pub mod symmetry;

//! Exact and numeric machinery for diffusions on the Thoma simplex: sparse
//! polynomial algebras in moment and natural coordinates, the generator and
//! carre-du-champ operators with their identity checkers, log-space
//! Q-transform evaluation with limit and bound sweeps, and an Euler-Maruyama
//! simulator for the truncated natural-coordinate process.

pub mod bounds;
pub mod cli;
pub mod coeff;
pub mod exppoly;
pub mod ext;
pub mod moment;
pub mod nat;
pub mod ops;
pub mod parser;
pub mod point;
pub mod poly;
pub mod qnum;
pub mod report;
pub mod signed_log;
pub mod sim;
pub mod simmat;
pub mod sweep;
pub mod verify;

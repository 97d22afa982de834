//! Exact arithmetic in the group of formal power series `r + c1 r^2 + ...`
//! under composition, truncated at a finite order, with coefficients in
//! polynomial rings over the rationals.

pub mod bpcheck;
pub mod cli;
pub mod embed;
pub mod field;
pub mod liealg;
pub mod parse;
pub mod series;

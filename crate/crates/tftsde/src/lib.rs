pub mod graph;
pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod expr;
pub mod sde;
pub mod tutte;

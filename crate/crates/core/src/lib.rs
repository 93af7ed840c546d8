pub mod algebra;
pub mod congruence;
pub mod error;
pub mod filter;
pub mod homomorphism;
pub mod partition;
pub mod table;
pub mod clone_power;
pub mod free;
pub mod uniform;
pub mod catalog;
pub mod colimit;
pub mod logic;
pub mod descriptor;
pub mod verify;

pub mod cli;
pub mod cone;
pub mod density;
pub mod document;
pub mod error;
pub mod extend;
pub mod fuzz;
pub mod operator;
pub mod peaking;
pub mod pseudometric;
pub mod random;
pub mod rational;
pub mod reconstruct;
pub mod space;

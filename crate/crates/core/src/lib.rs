pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod fromax;
pub mod linear;
pub mod meta;
pub mod nilepro;
pub mod numax;
pub mod prox;
pub mod secant;
pub mod solver;

pub use error::{EmbedError, Result};

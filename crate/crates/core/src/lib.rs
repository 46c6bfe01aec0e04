pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod scenarios;
pub mod state;
pub mod system;

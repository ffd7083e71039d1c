pub mod command;
pub mod error;
pub mod reproduce;
pub mod script;
pub mod session;

pub use error::CliError;
pub use session::{RunReport, Session};

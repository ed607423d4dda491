//! Library side of the `ort` command: state evaluation, CSV tables, figure
//! datasets and the verification battery.

pub mod app;
pub mod eval;
pub mod figures;
pub mod opts;
pub mod table;
pub mod verify;

pub use app::run;

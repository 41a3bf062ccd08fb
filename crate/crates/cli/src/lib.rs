//! Command-line front end: argument parsing, sweeps, CSV tables and figure
//! presets on top of the `fblmimo` library.

pub mod args;
pub mod plot;
pub mod presets;
pub mod run;
pub mod table;

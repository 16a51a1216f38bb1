//! Tunneling exponent from quantum scans in 1/g², and the comparison with
//! the semiclassical F₀(ε).

mod compare;
mod fit;
mod scan;

pub use compare::{compare, interpolate, ComparisonRow, SemiclassicalF0, Tolerance};
pub use fit::{fit_exponent, runs_test, FitResult, MIN_FIT_POINTS};
pub use scan::{scan_g, scan_point, ScanPoint, ScanPolicy, ScanSeries};

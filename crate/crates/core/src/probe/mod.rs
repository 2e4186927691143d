//! Structure probes: slice scans of the piecewise-constant cost, the
//! distinct-output-vector census, empirical shattering, and MLP degree
//! probing.

mod census;
mod degree;
mod scan;
mod shatter;

pub use census::{
    census_output_vectors, census_to_csv, sample_cost_vectors, OutputCensus, ParamSampler,
};
pub use degree::{degree_probe, DegreeRegion};
pub use scan::{scan_line, scan_slice, scan_to_csv, total_cost, SliceScan, SliceSpec};
pub use shatter::{shatter_from_samples, shatter_search, ShatterResult};

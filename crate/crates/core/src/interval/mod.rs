//! Piecewise-linear interval maps and their finite covers.

pub mod map;
pub mod partition;
pub mod tent;

pub use map::{
    detect_finiteness, extract_sft_cover, refine_umn, FinitenessReport, MapError, PiecewiseLinearMap,
    Refiner, DEFAULT_CELL_BUDGET,
};
pub use partition::{Rational, RegularOpenPartition};
pub use tent::{cover_report_tent, tent_break_sets, tent_map, BreakSets};

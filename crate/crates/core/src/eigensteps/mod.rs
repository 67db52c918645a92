//! Inner and outer eigenstep tables: validation, conversion, Top Kill, and
//! the interval parametrization of every valid table.

mod bounds;
mod table;
mod topkill;

pub use bounds::{
    build_inner, free_parameter_count, inner_bounds, parametrize_inner, IntervalBounds, LowerTerm,
    Selection, UpperTerm,
};
pub use table::{
    inner_to_outer, outer_to_inner, validate_inner, validate_outer, InnerEigenstepTable,
    OuterEigenstepTable,
};
pub use topkill::{admissible_pivots, topkill_at, topkill_step, topkill_table};

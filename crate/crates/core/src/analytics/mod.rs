//! Exact closed-form quantities and empirical surveys over scheme space.

mod bounds;
mod density;
mod survey;

pub use bounds::{
    bijection_left_to_right, bijection_right_to_left, interval_density_bounds,
    right_density_bounds, split_left_right, LeftRightSplit,
};
pub use density::{
    asymptotic_ratios, c_closed, delta_period, delta_product_form, exact_asymptotic_ratios,
    interval_density, theta, AsymptoticRatios, DensityValue,
};
pub use survey::{average_density_survey, extrema_survey, ExtremaReport, IntervalRole};

//! Measurements on rendered sets: connected components, containment between
//! fields, and box-counting dimension.

mod boxdim;
mod labeling;
mod relations;

pub use boxdim::{box_counting_dim, default_scales, DimensionEstimate};
pub use labeling::{label_components, ComponentLabeling, Connectivity};
pub use relations::{
    equality_relation, nesting_check, subset_relation, RelationReport, DEFAULT_TOLERANCE,
};

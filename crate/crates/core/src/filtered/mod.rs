//! Filtered matrices: partitions, filtrations, representations and the
//! backward inversion algorithm.

mod algorithm;
mod cbf;
mod conditions;
mod partition;
mod rep;

pub use algorithm::{
    invert_filtered, invert_sfm, AlgoTrace, ExtReal, GeneralStep, SfmStep, Steps, StopReason,
};
pub use cbf::{cbf_to_sfm, is_cbf};
pub use conditions::{
    check_frances_condition, check_gum_condition, check_invm_condition, tau_filtered,
    ConditionReport,
};
pub use partition::{Filtration, Partition};
pub use rep::{FilteredLayer, FilteredRep, SfmLayer, SfmRep};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilteredError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("partition {level} does not refine partition {}", .level - 1)]
    NotRefinement { level: usize },
    #[error("layer {layer}: vector {which} is not measurable for the required partition")]
    NotMeasurable { layer: usize, which: char },
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("matrix is not in constant block form")]
    NotCbf,
}

use crate::groupoid::ElemId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid groupoid table: {0}")]
    InvalidGroupoid(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("unit subset is not invariant: element {element} joins it to its complement")]
    NotInvariant { element: ElemId },
    #[error("not a subgroupoid: {0}")]
    NotSubgroupoid(String),
    #[error("operands belong to different groupoids")]
    GroupoidMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix shape error: {0}")]
    Shape(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("nonabelian group: {0}")]
    NonAbelian(String),
    #[error("not a groupoid isomorphism: {0}")]
    NotIsomorphism(String),
    #[error("representations are labelled by different generator sets")]
    LabelMismatch,
    #[error("covariance violated: {0}")]
    Covariance(String),
    #[error("invalid groupoid equivalence: {0}")]
    InvalidEquivalence(String),
    #[error("elements lie in different fibers ({0} vs {1})")]
    FiberMismatch(u32, u32),
    #[error("sequence leaves the declared fibers at index {index}: {reason}")]
    OutOfFiber { index: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

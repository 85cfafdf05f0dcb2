//! Exact and numeric tools for area statistics of lattice paths and column-convex
//! polygons: exact enumeration, limiting moment recursions, the kernel method and
//! empirical convergence checks.
//!
//! The engines are generic over the scalar type ([`Weight`] for exact/float DP
//! accumulators, [`Real`] for kernel numerics); the aliases below fix the common choices.

pub mod budget;
pub mod converge;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod kernel;
pub mod limits;
pub mod polyomino;
pub mod radical;
pub mod scalar;
pub mod selftest;
pub mod steps;
pub mod tolerances;

pub use budget::MemoryBudget;
pub use enumerate::{AreaDistribution, BridgeDistribution, MomentTable, PathClass, SignedMomentTable};
pub use error::{Error, Result};
pub use kernel::{BranchSet, BranchSetF64, CatalyticSolution, KernelProfile, KernelProfileF64, Regime};
pub use limits::{LimitKind, LimitTables, RecursionTable, TableKind};
pub use radical::ExactRadical;
pub use scalar::{Real, Weight};
pub use steps::{SpecFormat, StepCharacteristics, StepSet};
pub use tolerances::Tolerances;

pub type ExactMomentTable = MomentTable<num_rational::BigRational>;
pub type MomentTableF64 = MomentTable<f64>;
pub type ExactSignedMomentTable = SignedMomentTable<num_rational::BigRational>;

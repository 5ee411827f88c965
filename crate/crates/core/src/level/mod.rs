//! Excursion levels and the importance sampling proposals built from them.

mod find;
mod function;
pub mod normal;
mod proposals;

pub use find::{find_level, LevelDiagnostics, LevelOptions};
pub use function::{build_level_function, LevelFunction};
pub use proposals::{build_proposals, ProposalDensities, SigmaMode};

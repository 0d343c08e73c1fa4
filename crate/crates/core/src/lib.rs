pub mod bounds;
pub mod error;
pub mod families;
pub mod idempotent;
pub mod linalg;
pub mod matched;
pub mod oracle;
pub mod range;
pub mod registry;
pub mod verify;

pub use error::{Error, Result};
pub use idempotent::{Idempotent, Projection};
pub use linalg::{ComplexMatrix, SvdResult};

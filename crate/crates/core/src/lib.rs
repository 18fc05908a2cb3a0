pub mod error;
pub mod exact;

pub use error::{Error, Result};
pub mod angular;
pub mod hypergeom;
pub mod oracle;
pub mod stretched;
pub mod bench;

//! Synchronizing transducers over Cantor space and the groups `O_n`, `TO_n`
//! of their cores.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod format;
pub mod group;
pub mod image;
pub mod inverse;
pub mod minimize;
pub mod par;
pub mod signature;
pub mod suite;
pub mod sync;
pub mod transducer;
pub mod viable;
pub mod words;

pub use bounds::Bounds;
pub use error::{Error, Result};
pub use transducer::{product, product_from, Edge, StateId, Transducer};
pub use words::{ClopenSet, DottedWord, EvPeriodicWord, Letter, RotationClass, Space, Word};

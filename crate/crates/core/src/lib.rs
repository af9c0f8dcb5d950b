//! Blocked distributed arrays executed on an in-process task-dataflow runtime.
//!
//! A [`DistArray`] is a 2D matrix cut into a grid of blocks. Each block is the
//! output of a task submitted to a [`Runtime`], which schedules tasks onto a
//! worker pool as soon as their input handles are ready. Operators build new
//! arrays by submitting more tasks; nothing is computed on the driver until
//! [`DistArray::collect`] (or another fetch) synchronizes.
//!
//! ```
//! use dsarray::{Axis, DistArray, Runtime};
//!
//! let rt = Runtime::new(4);
//! let w = DistArray::random(&rt, 6, 4, (2, 2), 7)?;
//! let norms = w.transpose()?.norm_axis(Axis::Cols)?.pow(2.0)?.sqrt()?;
//! assert_eq!(norms.shape(), (4, 1));
//! # Ok::<(), dsarray::Error>(())
//! ```
//!
//! The row-partitioned [`SubsetDataset`] in [`baseline`] is kept alongside as
//! the structure ds-arrays replace, so that task counts of both can be
//! compared on identical data.

pub mod array;
pub mod baseline;
pub mod block;
pub mod error;
pub mod io;
pub mod ml;
pub mod ops;
pub mod runtime;
mod shuffle;

pub use array::DistArray;
pub use baseline::{Subset, SubsetDataset};
pub use block::{Block, CsrMatrix, Matrix};
pub use error::{Error, Result};
pub use ml::{AlsModel, KMeansModel};
pub use ops::{Axis, BinaryOp, ElementwiseFn, Reduction};
pub use runtime::{Arg, Handle, HandleState, Payload, Runtime, RuntimeStats, TaskId};

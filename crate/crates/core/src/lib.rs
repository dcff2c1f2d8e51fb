#![no_std]
extern crate alloc;

pub mod error;
pub mod field;
pub mod jet;
pub mod matrix;
pub mod system;
pub mod chain;
pub mod linalg;
pub mod reduce;
pub mod verify;

pub use error::{Error, Result};

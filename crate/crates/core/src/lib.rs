//! Exact algebra over finite group rings (Z/pⁿ)[G]: Howell forms, exterior
//! bi-duals, Fitting and characteristic ideals, Stickelberger elements over Q,
//! Kolyvagin derivatives and Stark systems on synthetic Selmer data.

pub mod character;
pub mod cyclotomic;
pub mod error;
pub mod exterior;
pub mod ideal;
pub mod kolyvagin;
pub mod linalg;
pub mod module;
pub mod random;
pub mod ring;
pub mod stark;
pub mod stickelberger;
pub mod suite;
pub mod units;

pub use error::{Error, Result};

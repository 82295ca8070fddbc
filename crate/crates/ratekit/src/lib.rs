//! Rate computations for dense wireless networks on a square grid:
//! local TDMA rates under spatial reuse, distributed MIMO with finite
//! backhaul, hierarchical cooperation schedules and multihop routing.

pub mod coding;
pub mod error;
pub mod mimo;
pub mod model;
pub mod multihop;
pub mod schemes;

pub use error::{RateError, Result};

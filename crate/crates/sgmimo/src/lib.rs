//! File formats, bundled fixtures and the command-line front end for
//! [`sgmimo_core`].
//!
//! - [`dataset`]: the `MMK1` CSI file (text header, raw little-endian `complex32` payload).
//! - [`csv_io`]: `n,f,m,re,im` sample tables and `antenna,gain_db` profiles.
//! - [`bands`]: extra SRD bands from JSON.
//! - [`fixtures`]: digitized per-antenna gain curves of the outdoor ULA/URA campaign.
//! - [`cli`]: the `sgmimo` command.

pub mod bands;
pub mod cli;
pub mod csv_io;
pub mod dataset;
pub mod error;
pub mod fixtures;

pub use error::{IoError, Result};

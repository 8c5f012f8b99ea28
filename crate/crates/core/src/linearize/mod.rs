//! Linearization of fibered maps around the zero section.
//!
//! * [`modulus_rescale`] conjugates by a fiberwise scaling so that `|c_1|`
//!   becomes close to its geometric mean `kappa`;
//! * [`koenigs_linearize`] builds the attracting conjugacy as the grid limit of
//!   `g^n = (prod rho_1)^{-1} f^n`;
//! * [`siegel_formal_linearize`] solves the indifferent normal form order by
//!   order with exact Fourier bookkeeping of every divisor.

mod koenigs;
mod rescale;
mod siegel;

pub use koenigs::{koenigs_direct, koenigs_linearize, koenigs_step_identity, KoenigsConjugacy, KoenigsGrid};
pub use rescale::{modulus_rescale, RescaleData};
pub use siegel::{siegel_formal_linearize, FormalConjugacy, SiegelOptions};

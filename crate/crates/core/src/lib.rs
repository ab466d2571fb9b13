//! Igusa local zeta functions, p-adic measure data and S-part counting for
//! univariate integer polynomials.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: integer polynomials, squarefree decomposition, discriminants
//! * [`padic`]: valuations, Z_p-roots with multiplicities, `u_p`
//! * [`igusa`]: `λ_p`, `a_p`, exponents `k_i`, local measures, the zeta function
//! * [`msums`]: sums over multiplicative semigroups, lattice counts, oscillation constants
//! * [`counting`]: exact S-part counters, the real measure of `V_f`, predictions
//! * [`cli`]: configuration, dispatch and report rendering for the `spart` binary

pub mod cli;
pub mod counting;
pub mod error;
pub mod igusa;
pub mod msums;
pub mod num;
pub mod padic;
pub mod poly;

pub use error::{Error, Result};
pub use poly::{IntPoly, SquarefreeDecomposition};

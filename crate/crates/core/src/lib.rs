//! Entropy of multi-dimensional constrained colourings through transfer operators.
//!
//! A [`constraint::ConstraintSystem`] gives one constraint graph per lattice axis. From it
//! the crate builds row and slab transfer operators ([`transfer`]) and one-vertex operators
//! ([`one_vertex`]), finds their Perron roots with certified Collatz-Wielandt enclosures
//! ([`spectral`]), and turns those into entropy bounds ([`bounds`]). [`oracle`] counts
//! colourings by brute force to check the operators exactly.
//!
//! ```no_run
//! use capacity_lab::constraint::{hard_square_system, Boundary};
//! use capacity_lab::spectral::{perron_radius, IterationConfig};
//! use capacity_lab::transfer::build_row_transfer_2d;
//!
//! let t = build_row_transfer_2d(&hard_square_system(2)?, 10, Boundary::Open)?;
//! let rho = perron_radius(&t, &IterationConfig::with_precision(30))?;
//! assert!(rho.contains(&rho.value));
//! # Ok::<(), capacity_lab::Error>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability:
//!
//! | example | shows |
//! |---|---|
//! | `hard_square_table` | standard and periodic radii for widths 2..n |
//! | `rigorous_bracket` | every rigorous lower and upper bound from widths up to n |
//! | `one_vertex_estimate` | one-vertex radii, the heuristic bracket and the sandwich check |
//! | `slab_3d` | 3-D slab operators under the three boundary choices |
//! | `one_vertex_3d` | the 3-D one-vertex operator on helical slab words |
//! | `monomer_dimer` | the monomer-dimer encoding checked against tilings |
//! | `oracle_identities` | walk counts against brute-force enumeration |
//! | `checkpoint_resume` | stopping and resuming a long iteration |
//! | `custom_system` | a system read from the text format |

pub mod bounds;
pub mod constraint;
mod error;
pub mod experiment;
pub mod limits;
pub mod numeric;
pub mod one_vertex;
pub mod operator;
pub mod oracle;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};

//! Exact computer algebra for Kirwan blowups of torus-equivariant affine
//! schemes.
//!
//! Everything is computed over the rationals. Polynomials live in
//! [`poly`], ideals and Groebner bases in [`groebner`], the weight
//! combinatorics of a diagonal torus in [`torus`], blowup charts and local
//! models in [`blowup`], GIT stability in [`stability`], the obstruction
//! complex and Omega-equivalences in [`dcrit`], and one-parameter families
//! in [`family`].

pub mod blowup;
pub mod dcrit;
pub mod error;
pub mod family;
pub mod groebner;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod poly;
pub mod stability;
pub mod torus;

pub use error::{Error, Result};
pub use groebner::{Budget, GroebnerBasis, Ideal};
pub use poly::{frac, parse_poly, rat, Monomial, MonomialOrder, MultiPoly, Rational, Ring};
pub use torus::{Subtorus, WeightMatrix};

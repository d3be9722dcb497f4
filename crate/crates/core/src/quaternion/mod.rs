//! Definite quaternion algebras over Q and their Eichler orders: ideal
//! classes, unit weights, Brandt matrices and Atkin-Lehner permutations.

mod algebra;
mod brandt;
mod ideal;
mod order;

pub use algebra::{hilbert_symbol, ramified_primes, Quat, QuaternionAlgebra};
pub use brandt::{AlPermutation, BrandtMatrix, IdealClassSet};
pub use ideal::Ideal;
pub use order::{maximal_order, reduced_disc, EichlerOrder, Elt, RatLattice};

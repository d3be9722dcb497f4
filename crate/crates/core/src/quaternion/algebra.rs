use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, kronecker, prime_factors};
use crate::error::{invalid, invariant, Result};

/// A definite quaternion algebra over Q with basis 1, i, j, k = ij,
/// i² = a, j² = b, ji = −ij.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    disc: u64,
    a: i64,
    b: i64,
}

/// Element of the algebra in the standard basis, with integer coordinates.
pub type Quat = [i128; 4];

fn split_power(x: i64, p: u64) -> (u32, i64) {
    let p = p as i64;
    let (mut e, mut u) = (0, x);
    while u % p == 0 {
        u /= p;
        e += 1;
    }
    (e, u)
}

/// Hilbert symbol (a, b)_p at a finite prime p.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i8 {
    let (alpha, u) = split_power(a, p);
    let (beta, v) = split_power(b, p);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2) as u32 % 2;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            ((r * r - 1) / 8) as u32 % 2
        };
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s: i64 = if (alpha * beta) % 2 == 1 && p % 4 == 3 {
            -1
        } else {
            1
        };
        if beta % 2 == 1 {
            s *= kronecker(u, p).value();
        }
        if alpha % 2 == 1 {
            s *= kronecker(v, p).value();
        }
        s as i8
    }
}

/// Finite primes at which (a, b) ramifies.
pub fn ramified_primes(a: i64, b: i64) -> Vec<u64> {
    let mut cand = prime_factors(2 * a.unsigned_abs() * b.unsigned_abs());
    cand.dedup();
    cand.into_iter()
        .filter(|&p| hilbert_symbol(a, b, p) == -1)
        .collect()
}

impl QuaternionAlgebra {
    /// The definite algebra ramified exactly at the primes of `disc` and ∞.
    pub fn new(disc: u64) -> Result<QuaternionAlgebra> {
        if disc < 2 || !is_squarefree(disc) || prime_factors(disc).len() % 2 != 1 {
            return Err(invalid!(
                "definite discriminant {disc} must be squarefree with an odd number of prime factors"
            ));
        }
        if let Ok(alg) = QuaternionAlgebra::with_constants(disc, -1, -1) {
            return Ok(alg);
        }
        // (a, b) = (−s, −disc·t), ordered by s·t
        for size in 1..=4000i64 {
            for s in 1..=size {
                if size % s != 0 {
                    continue;
                }
                let t = size / s;
                if let Ok(alg) = QuaternionAlgebra::with_constants(disc, -s, -(disc as i64) * t) {
                    return Ok(alg);
                }
            }
        }
        Err(invariant!(
            "no structure constants found for discriminant {disc}"
        ))
    }

    pub fn with_constants(disc: u64, a: i64, b: i64) -> Result<QuaternionAlgebra> {
        if a >= 0 || b >= 0 {
            return Err(invalid!("({a}, {b}) is not definite"));
        }
        if ramified_primes(a, b) != prime_factors(disc) {
            return Err(invalid!("({a}, {b}) does not have discriminant {disc}"));
        }
        Ok(QuaternionAlgebra { disc, a, b })
    }

    pub fn disc(&self) -> u64 {
        self.disc
    }

    pub fn constants(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let (a, b) = (self.a as i128, self.b as i128);
        [
            x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - a * b * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
            x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
            x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
        ]
    }

    pub fn conj(&self, x: &Quat) -> Quat {
        [x[0], -x[1], -x[2], -x[3]]
    }

    pub fn norm(&self, x: &Quat) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3]
    }

    /// trd(x ȳ).
    pub fn trace_pair(&self, x: &Quat, y: &Quat) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        2 * (x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3])
    }

    /// Is the algebra ramified at p? (Hilbert symbol check, finite p.)
    pub fn is_ramified_at(&self, p: u64) -> bool {
        hilbert_symbol(self.a, self.b, p) == -1
    }

    /// Real place: definite iff both constants are negative.
    pub fn is_definite(&self) -> bool {
        self.a < 0 && self.b < 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_algebras() {
        let a2 = QuaternionAlgebra::new(2).unwrap();
        assert_eq!(a2.constants(), (-1, -1));
        let a3 = QuaternionAlgebra::new(3).unwrap();
        assert_eq!(a3.constants(), (-1, -3));
        let a41 = QuaternionAlgebra::new(41).unwrap();
        assert_eq!(
            ramified_primes(a41.constants().0, a41.constants().1),
            vec![41]
        );
        assert!(QuaternionAlgebra::new(6).is_err());
        assert!(QuaternionAlgebra::new(12).is_err());
    }

    #[test]
    fn hilbert_product_formula() {
        // ∏_v (a,b)_v = 1, with (a,b)_∞ = −1 iff a, b < 0
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                if a == 0 || b == 0 {
                    continue;
                }
                let mut prod: i64 = if a < 0 && b < 0 { -1 } else { 1 };
                for p in prime_factors(2 * a.unsigned_abs() * b.unsigned_abs()) {
                    prod *= hilbert_symbol(a, b, p) as i64;
                }
                assert_eq!(prod, 1, "({a},{b})");
            }
        }
    }

    #[test]
    fn hilbert_symbol_values() {
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(-1, -1, 3), 1);
        assert_eq!(hilbert_symbol(-1, -3, 3), -1);
        assert_eq!(hilbert_symbol(2, 3, 3), -1);
        assert_eq!(hilbert_symbol(5, 5, 5), 1);
    }

    #[test]
    fn algebras_up_to_1000() {
        for d in 2u64..1000 {
            if let Ok(alg) = QuaternionAlgebra::new(d) {
                let (a, b) = alg.constants();
                assert_eq!(ramified_primes(a, b), prime_factors(d));
                assert!(alg.is_definite());
            }
        }
    }

    #[test]
    fn multiplication_is_associative_and_norm_multiplicative() {
        let alg = QuaternionAlgebra::new(41).unwrap();
        let xs: [Quat; 3] = [[1, 2, -1, 3], [0, 1, 1, -2], [5, 0, 2, 1]];
        for x in &xs {
            for y in &xs {
                assert_eq!(alg.norm(&alg.mul(x, y)), alg.norm(x) * alg.norm(y));
                for z in &xs {
                    assert_eq!(alg.mul(&alg.mul(x, y), z), alg.mul(x, &alg.mul(y, z)));
                }
            }
            let xc = alg.mul(x, &alg.conj(x));
            assert_eq!(xc, [alg.norm(x), 0, 0, 0]);
        }
    }
}

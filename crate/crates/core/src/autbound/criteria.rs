//! Bounds from CM points and from the reduction at primes of bad and good
//! reduction. Each function returns a bound on s, with ∞ meaning the
//! criterion does not apply; a proof of s = r is the bound r.

use crate::arith::{
    cm_class_factor, cm_sign_excess, field_discriminant, kronecker, local_sign, ord2, ExtNat, Level,
};
use crate::error::{invalid, Result};
use crate::shimura::{eichler_class_number, genus};

fn require_genus(level: &Level) -> Result<u64> {
    let g = genus(level)?;
    if g < 2 {
        return Err(invalid!("{level} has genus {g} < 2"));
    }
    Ok(g)
}

/// s = r when (−4/p) = ε_p and (−3/q) = ε_q for some p, q | DN.
pub fn cm_i(level: &Level) -> Result<ExtNat> {
    require_genus(level)?;
    let hits = |delta: i64| -> Result<bool> {
        for p in level.primes() {
            if kronecker(delta, p) == local_sign(level, p)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    Ok(if hits(-4)? && hits(-3)? {
        ExtNat::Finite(level.r() as u64)
    } else {
        ExtNat::Infinite
    })
}

/// s ≤ ord₂ h_{D,N}(m) + σ_{D,N}(m) + 1 for an Atkin-Lehner index m.
pub fn cm_ii(level: &Level, m: u64) -> Result<ExtNat> {
    require_genus(level)?;
    let sigma = cm_sign_excess(level, m)?;
    if sigma.is_infinite() {
        return Ok(ExtNat::Infinite);
    }
    Ok(ord2(cm_class_factor(level, m)?) + sigma + 1)
}

/// s ≤ ord₂(g − 1) + 2.
pub fn cm_iii(level: &Level) -> Result<ExtNat> {
    let g = require_genus(level)?;
    Ok(ord2(g - 1) + 2)
}

/// For m ∈ {2, 3}: if (δ_m/p) ≠ ε_p for every p | DN except possibly one
/// prime of D, then s = r when m | DN and s ≤ r + 1 otherwise.
pub fn cd_i(level: &Level, m: u64) -> Result<ExtNat> {
    require_genus(level)?;
    if m != 2 && m != 3 {
        return Err(invalid!("m must be 2 or 3"));
    }
    let delta = field_discriminant(m)?.value();
    let mut exceptions = Vec::new();
    for p in level.primes() {
        if kronecker(delta, p) == local_sign(level, p)? {
            exceptions.push(p);
        }
    }
    let holds = match exceptions.as_slice() {
        [] => true,
        [p] => level.d() % p == 0,
        _ => false,
    };
    let r = level.r() as u64;
    Ok(match (holds, level.dn() % m == 0) {
        (false, _) => ExtNat::Infinite,
        (true, true) => ExtNat::Finite(r),
        (true, false) => ExtNat::Finite(r + 1),
    })
}

/// s = r when 6 | DN.
pub fn six_divides_level(level: &Level) -> Result<ExtNat> {
    require_genus(level)?;
    Ok(if level.dn() % 6 == 0 {
        ExtNat::Finite(level.r() as u64)
    } else {
        ExtNat::Infinite
    })
}

/// s ≤ ord₂ h(D/p, N) + 3 for odd p | D.
pub fn cd_ii(level: &Level, p: u64) -> Result<ExtNat> {
    require_genus(level)?;
    if p == 2 || level.d() % p != 0 {
        return Err(invalid!(
            "p = {p} must be an odd prime dividing D = {}",
            level.d()
        ));
    }
    Ok(ord2(eichler_class_number(level.d() / p, level.n())?) + 3)
}

/// s ≤ ord₂ |M₀(D,N)_ℓ(F_ℓ)| + 1 from an externally supplied point count.
pub fn cd_iii(level: &Level, ell: u64, point_count: u64) -> Result<ExtNat> {
    require_genus(level)?;
    if !crate::arith::is_prime(ell) || (2 * level.dn()) % ell == 0 {
        return Err(invalid!("ℓ = {ell} must be a prime not dividing 2DN"));
    }
    Ok(ord2(point_count) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(d: u64, n: u64) -> Level {
        Level::new(d, n).unwrap()
    }

    #[test]
    fn cm_i_examples() {
        assert_eq!(cm_i(&lv(65, 1)).unwrap(), ExtNat::Finite(2));
        assert_eq!(cm_i(&lv(205, 1)).unwrap(), ExtNat::Infinite);
        assert!(cm_i(&lv(6, 1)).is_err());
    }

    #[test]
    fn cm_ii_examples() {
        assert_eq!(cm_ii(&lv(26, 1), 13).unwrap(), ExtNat::Finite(2));
        // h(−20) = 2 and the symbols at 5 and 41
        let b = cm_ii(&lv(205, 1), 5).unwrap();
        let sigma = cm_sign_excess(&lv(205, 1), 5).unwrap();
        assert_eq!(
            b,
            if sigma.is_infinite() {
                ExtNat::Infinite
            } else {
                sigma + 2
            }
        );
    }

    #[test]
    fn cm_iii_examples() {
        assert_eq!(cm_iii(&lv(205, 1)).unwrap(), ExtNat::Finite(4));
        assert_eq!(cm_iii(&lv(26, 1)).unwrap(), ExtNat::Finite(2));
    }

    #[test]
    fn cd_examples() {
        // (−4/7) = −1 = ε_7 with 7 | N, so the hypothesis fails at (6, 35)
        assert_eq!(cd_i(&lv(6, 35), 2).unwrap(), ExtNat::Infinite);
        assert_eq!(cd_i(&lv(6, 65), 2).unwrap(), ExtNat::Finite(4));
        assert_eq!(cd_ii(&lv(205, 1), 5).unwrap(), ExtNat::Finite(5));
        assert_eq!(cd_ii(&lv(26, 1), 13).unwrap(), ExtNat::Finite(3));
        assert!(cd_ii(&lv(26, 1), 2).is_err());
        assert!(cd_ii(&lv(205, 1), 7).is_err());
        assert_eq!(cd_iii(&lv(205, 1), 3, 4).unwrap(), ExtNat::Finite(3));
        assert_eq!(cd_iii(&lv(205, 1), 3, 6).unwrap(), ExtNat::Finite(2));
        assert_eq!(cd_iii(&lv(205, 1), 3, 0).unwrap(), ExtNat::Infinite);
        assert!(cd_iii(&lv(205, 1), 5, 4).is_err());
        assert!(cd_iii(&lv(205, 1), 2, 4).is_err());
    }

    #[test]
    fn six_divides() {
        assert_eq!(six_divides_level(&lv(6, 35)).unwrap(), ExtNat::Finite(4));
        assert_eq!(six_divides_level(&lv(205, 1)).unwrap(), ExtNat::Infinite);
    }
}

//! Invariants of the curve X₀(D,N): elliptic points, genus, CM points,
//! Atkin-Lehner fixed points, and the Eichler class number of the definite
//! orders that appear at the primes of bad reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{
    class_number, field_discriminant, is_squarefree, kronecker, local_sign, prime_factors, Level,
    QuadDiscriminant,
};
use crate::error::{invalid, invariant, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInvariants {
    pub level: Level,
    pub e2: u64,
    pub e3: u64,
    pub genus: u64,
}

impl CurveInvariants {
    pub fn new(level: &Level) -> Result<CurveInvariants> {
        Ok(CurveInvariants {
            level: level.clone(),
            e2: elliptic_count(level, 2)?,
            e3: elliptic_count(level, 3)?,
            genus: genus(level)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CMCount {
    pub order_disc: QuadDiscriminant,
    pub count: u64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn to_integer(x: &BigRational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(invariant!("{what} evaluated to the non-integer {x}"));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| invariant!("{what} does not fit in 64 bits"))
}

/// Number of elliptic points of order i ∈ {2, 3}.
pub fn elliptic_count(level: &Level, i: u64) -> Result<u64> {
    if i != 2 && i != 3 {
        return Err(invalid!("elliptic points have order 2 or 3, not {i}"));
    }
    let delta = if i == 2 { -4 } else { -3 };
    for p in level.primes() {
        if kronecker(delta, p) == local_sign(level, p)? {
            return Ok(0);
        }
    }
    let r = level.r();
    Ok(if level.dn() % i == 0 {
        1 << (r - 1)
    } else {
        1 << r
    })
}

/// Genus of X₀(D,N), in exact rational arithmetic.
pub fn genus(level: &Level) -> Result<u64> {
    let mut vol = rat(level.dn() as i64) / rat(12);
    for &p in level.d_primes() {
        vol *= rat(1) - BigRational::new(BigInt::one(), BigInt::from(p));
    }
    for &q in level.n_primes() {
        vol *= rat(1) + BigRational::new(BigInt::one(), BigInt::from(q));
    }
    let e2 = elliptic_count(level, 2)? as i64;
    let e3 = elliptic_count(level, 3)? as i64;
    let g = rat(1) + vol
        - BigRational::new(e3.into(), 3.into())
        - BigRational::new(e2.into(), 4.into());
    let g = to_integer(&g, &format!("genus of {level}"))?;
    u64::try_from(g).map_err(|_| invariant!("negative genus {g} for {level}"))
}

/// |CM(d)| on X₀(D,N) for the imaginary quadratic order of discriminant d.
pub fn cm_count(level: &Level, order_disc: QuadDiscriminant) -> CMCount {
    let dk = order_disc.fundamental();
    let zero = CMCount {
        order_disc,
        count: 0,
    };
    if order_disc.conductor().gcd(&level.dn()) != 1 {
        return zero;
    }
    let mut k = 0;
    for p in level.primes() {
        let eps = local_sign(level, p).expect("p divides DN");
        let s = kronecker(dk, p);
        if s == eps {
            return zero;
        }
        if s == -eps {
            k += 1;
        }
    }
    CMCount {
        order_disc,
        count: class_number(order_disc) << k,
    }
}

fn cm_count_of(level: &Level, d: i64) -> u64 {
    cm_count(level, QuadDiscriminant::new(d).expect("valid discriminant")).count
}

/// Number of fixed points of the Atkin-Lehner involution ω_m, m | DN, m > 1.
pub fn fixed_point_count(level: &Level, m: u64) -> Result<u64> {
    if m <= 1 || level.dn() % m != 0 {
        return Err(invalid!("m = {m} is not an Atkin-Lehner index for {level}"));
    }
    let mi = m as i64;
    Ok(if m == 2 {
        cm_count_of(level, -4) + cm_count_of(level, -8)
    } else if m % 4 == 3 {
        cm_count_of(level, -mi) + cm_count_of(level, -4 * mi)
    } else {
        cm_count_of(level, field_discriminant(m)?.value())
    })
}

fn check_definite_pair(delta: u64, nu: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    if !is_squarefree(delta) || delta < 2 {
        return Err(invalid!("discriminant {delta} must be squarefree and > 1"));
    }
    let dp = prime_factors(delta);
    if dp.len() % 2 != 1 {
        return Err(invalid!(
            "discriminant {delta} must have an odd number of prime factors"
        ));
    }
    if !is_squarefree(nu) || delta.gcd(&nu) != 1 {
        return Err(invalid!(
            "level {nu} must be squarefree and coprime to {delta}"
        ));
    }
    Ok((dp, prime_factors(nu)))
}

/// Mass Σ 1/|O_r(I)^×| of the definite Eichler order of discriminant δ and
/// level ν: (1/24)∏(p−1)∏(q+1).
pub fn eichler_mass(delta: u64, nu: u64) -> Result<BigRational> {
    let (dp, np) = check_definite_pair(delta, nu)?;
    let prod: i64 = dp.iter().map(|&p| p as i64 - 1).product::<i64>()
        * np.iter().map(|&q| q as i64 + 1).product::<i64>();
    Ok(BigRational::new(prod.into(), 24.into()))
}

/// Number of left ideal classes of a definite Eichler order of discriminant
/// δ and level ν.
pub fn eichler_class_number(delta: u64, nu: u64) -> Result<u64> {
    let (dp, np) = check_definite_pair(delta, nu)?;
    let term = |d: i64| -> i64 {
        let a: i64 = dp.iter().map(|&p| 1 - kronecker(d, p).value()).product();
        let b: i64 = np.iter().map(|&q| 1 + kronecker(d, q).value()).product();
        a * b
    };
    let h = eichler_mass(delta, nu)? * rat(2)
        + BigRational::new(term(-4).into(), 4.into())
        + BigRational::new(term(-3).into(), 3.into());
    let h = to_integer(&h, &format!("h({delta},{nu})"))?;
    if !h.is_positive() {
        return Err(invariant!("h({delta},{nu}) = {h} is not positive"));
    }
    Ok(h as u64)
}

/// Numbers h_2, h_3 of ideal classes with unit weight 2 or 3 for the definite
/// order of discriminant δ and level ν: (1/2)∏(1 − (δ_ℓ/p))∏(1 + (δ_ℓ/q)).
pub fn weight_class_count(delta: u64, nu: u64, ell: u64) -> Result<u64> {
    let (dp, np) = check_definite_pair(delta, nu)?;
    let d = match ell {
        2 => -4,
        3 => -3,
        _ => return Err(invalid!("weight class counts exist for 2 and 3, not {ell}")),
    };
    let a: i64 = dp.iter().map(|&p| 1 - kronecker(d, p).value()).product();
    let b: i64 = np.iter().map(|&q| 1 + kronecker(d, q).value()).product();
    let v = a * b;
    if v % 2 != 0 && !is_exceptional_definite(delta, nu) {
        return Err(invariant!(
            "odd weight class count {v}/2 for ({delta},{nu})"
        ));
    }
    Ok((v / 2) as u64)
}

/// Is this the level at which the definite order has a single class of
/// weight 12 or 6?
pub fn is_exceptional_definite(delta: u64, nu: u64) -> bool {
    (delta == 2 || delta == 3) && nu == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(d: u64, n: u64) -> Level {
        Level::new(d, n).unwrap()
    }

    #[test]
    fn elliptic_examples() {
        assert_eq!(elliptic_count(&lv(205, 1), 2).unwrap(), 0);
        assert_eq!(elliptic_count(&lv(205, 1), 3).unwrap(), 4);
        assert_eq!(elliptic_count(&lv(6, 1), 2).unwrap(), 2);
        assert!(elliptic_count(&lv(6, 1), 5).is_err());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus(&lv(205, 1)).unwrap(), 13);
        assert_eq!(genus(&lv(26, 1)).unwrap(), 2);
        assert_eq!(genus(&lv(6, 1)).unwrap(), 0);
    }

    #[test]
    fn cm_examples() {
        let l = lv(205, 1);
        assert_eq!(cm_count(&l, QuadDiscriminant::new(-3).unwrap()).count, 4);
        assert_eq!(cm_count(&l, QuadDiscriminant::new(-4).unwrap()).count, 0);
        // conductor 5 shares a prime with DN
        assert_eq!(cm_count(&l, QuadDiscriminant::new(-75).unwrap()).count, 0);
    }

    #[test]
    fn fixed_point_branches() {
        let l = lv(26, 1);
        assert_eq!(fixed_point_count(&l, 13).unwrap(), cm_count_of(&l, -52));
        let l = lv(205, 1);
        assert_eq!(fixed_point_count(&l, 5).unwrap(), cm_count_of(&l, -20));
        let l = lv(10, 21);
        assert_eq!(
            fixed_point_count(&l, 3).unwrap(),
            cm_count_of(&l, -3) + cm_count_of(&l, -12)
        );
        assert!(fixed_point_count(&l, 11).is_err());
    }

    #[test]
    fn eichler_examples() {
        assert_eq!(eichler_class_number(41, 1).unwrap(), 4);
        assert_eq!(eichler_class_number(151, 1).unwrap(), 13);
        assert_eq!(eichler_class_number(2, 1).unwrap(), 1);
        assert_eq!(eichler_class_number(3, 1).unwrap(), 1);
        assert_eq!(eichler_class_number(41, 5).unwrap(), 20);
        assert!(eichler_class_number(6, 1).is_err());
        assert!(eichler_class_number(3, 3).is_err());
    }

    #[test]
    fn h_two_n_is_odd() {
        // odd for primes N ≡ 3 (mod 8), not for every odd N: h(2,7) = 2
        assert_eq!(eichler_class_number(2, 7).unwrap(), 2);
        for n in (3u64..=200)
            .step_by(8)
            .filter(|&n| crate::arith::is_prime(n))
        {
            assert_eq!(eichler_class_number(2, n).unwrap() % 2, 1, "h(2,{n})");
        }
    }

    #[test]
    fn genus_and_elliptic_points() {
        for d in 2u64..=300 {
            let Ok(l) = Level::new(d, 1) else { continue };
            let inv = CurveInvariants::new(&l).unwrap();
            assert_eq!(inv.e2, cm_count_of(&l, -4));
            assert_eq!(inv.e3, cm_count_of(&l, -3));
        }
    }
}

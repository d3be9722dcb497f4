//! Exact elementary number theory used by every other module.
//!
//! Everything here is a pure function of its arguments: Kronecker symbols,
//! class numbers of imaginary quadratic orders (by reduced-form
//! enumeration), 2-adic valuations, and the level-dependent quantities that
//! feed the CM-point bounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    prime_factors(n).iter().product::<u64>() == n
}

/// Primes in increasing order, starting at 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

/// Value of a Kronecker symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Sign {
        match v.signum() {
            -1 => Sign::Minus,
            0 => Sign::Zero,
            _ => Sign::Plus,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::from_value(-self.value())
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_value(self.value() * rhs.value())
    }
}

/// A nonnegative integer or infinity. Infinity absorbs addition and is
/// larger than every integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinite,
}

impl ExtNat {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            ExtNat::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtNat::Infinite)
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::Finite(n)
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.cmp(b),
            (ExtNat::Finite(_), ExtNat::Infinite) => Ordering::Less,
            (ExtNat::Infinite, ExtNat::Finite(_)) => Ordering::Greater,
            (ExtNat::Infinite, ExtNat::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => ExtNat::Finite(a + b),
            _ => ExtNat::Infinite,
        }
    }
}

impl Add<u64> for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: u64) -> ExtNat {
        self + ExtNat::Finite(rhs)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinite => write!(f, "inf"),
        }
    }
}

// Serialized as a JSON integer, or `null` for infinity.
impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match Option::<u64>::deserialize(d)? {
            Some(n) => ExtNat::Finite(n),
            None => ExtNat::Infinite,
        })
    }
}

/// 2-adic valuation; `ord2(0)` is infinite.
pub fn ord2(n: u64) -> ExtNat {
    if n == 0 {
        ExtNat::Infinite
    } else {
        ExtNat::Finite(n.trailing_zeros() as u64)
    }
}

/// A level (D, N): D > 1 squarefree with an even number of prime factors,
/// N squarefree and coprime to D.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LevelRepr", into = "LevelRepr")]
pub struct Level {
    d: u64,
    n: u64,
    d_primes: Vec<u64>,
    n_primes: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct LevelRepr {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "N")]
    n: u64,
}

impl TryFrom<LevelRepr> for Level {
    type Error = crate::error::Error;
    fn try_from(r: LevelRepr) -> Result<Level> {
        Level::new(r.d, r.n)
    }
}

impl From<Level> for LevelRepr {
    fn from(l: Level) -> LevelRepr {
        LevelRepr { d: l.d, n: l.n }
    }
}

impl Level {
    pub fn new(d: u64, n: u64) -> Result<Level> {
        if d <= 1 || !is_squarefree(d) {
            return Err(invalid!("D = {d} must be a squarefree integer > 1"));
        }
        let d_primes = prime_factors(d);
        if d_primes.len() % 2 != 0 {
            return Err(invalid!(
                "D = {d} must have an even number of prime factors"
            ));
        }
        if n == 0 || !is_squarefree(n) {
            return Err(invalid!("N = {n} must be a squarefree positive integer"));
        }
        if d.gcd(&n) != 1 {
            return Err(invalid!("gcd(D, N) must be 1 (D = {d}, N = {n})"));
        }
        Ok(Level {
            d,
            n,
            d_primes,
            n_primes: prime_factors(n),
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dn(&self) -> u64 {
        self.d * self.n
    }

    pub fn d_primes(&self) -> &[u64] {
        &self.d_primes
    }

    pub fn n_primes(&self) -> &[u64] {
        &self.n_primes
    }

    /// All primes dividing D·N, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .d_primes
            .iter()
            .chain(&self.n_primes)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    /// Number of primes dividing D·N; the Atkin-Lehner group has order 2^r.
    pub fn r(&self) -> u32 {
        (self.d_primes.len() + self.n_primes.len()) as u32
    }

    /// Atkin-Lehner indices m > 1, i.e. all divisors of D·N except 1.
    pub fn atkin_lehner_indices(&self) -> Vec<u64> {
        let ps = self.primes();
        let mut out = Vec::new();
        for mask in 1u32..(1 << ps.len()) {
            let m: u64 = ps
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p)
                .product();
            out.push(m);
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(D={}, N={})", self.d, self.n)
    }
}

/// Discriminant of an imaginary quadratic order, d = c² · d_K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadDiscriminant {
    d: i64,
    fundamental: i64,
    conductor: u64,
}

impl QuadDiscriminant {
    pub fn new(d: i64) -> Result<QuadDiscriminant> {
        if d >= 0 {
            return Err(invalid!("discriminant {d} must be negative"));
        }
        if d.rem_euclid(4) > 1 {
            return Err(invalid!("{d} is not a discriminant (must be 0 or 1 mod 4)"));
        }
        let n = d.unsigned_abs();
        // n = s·t² with s squarefree
        let (mut s, mut t) = (1u64, 1u64);
        let mut rest = n;
        for p in prime_factors(n) {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if e % 2 == 1 {
                s *= p;
            }
            t *= p.pow(e / 2);
        }
        let (fundamental, conductor) = if (s as i64).wrapping_neg().rem_euclid(4) == 1 {
            (-(s as i64), t)
        } else {
            (-4 * s as i64, t / 2)
        };
        Ok(QuadDiscriminant {
            d,
            fundamental,
            conductor,
        })
    }

    pub fn value(self) -> i64 {
        self.d
    }

    pub fn fundamental(self) -> i64 {
        self.fundamental
    }

    pub fn conductor(self) -> u64 {
        self.conductor
    }

    pub fn is_fundamental(self) -> bool {
        self.conductor == 1
    }
}

fn jacobi(a: i64, n: u64) -> i64 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol (d / n) for n ≥ 1.
pub fn kronecker(d: i64, n: u64) -> Sign {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let e = n.trailing_zeros();
    let odd = n >> e;
    let at_two = if e == 0 {
        1
    } else if d % 2 == 0 {
        0
    } else {
        let s = match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
        if e % 2 == 0 {
            1
        } else {
            s
        }
    };
    Sign::from_value(at_two * jacobi(d, odd))
}

/// Class number h(d): the number of reduced primitive positive definite
/// binary quadratic forms ax² + bxy + cy² of discriminant d.
pub fn class_number(d: QuadDiscriminant) -> u64 {
    let n = d.value().unsigned_abs();
    let mut count = 0;
    let mut a = 1u64;
    // a ≤ sqrt(|d|/3)
    while 3 * a * a <= n {
        for b in -(a as i64)..=(a as i64) {
            let num = b * b + n as i64;
            if num % (4 * a as i64) != 0 {
                continue;
            }
            let c = (num / (4 * a as i64)) as u64;
            if c < a {
                continue;
            }
            if b < 0 && (b.unsigned_abs() == a || a == c) {
                continue;
            }
            if a.gcd(&b.unsigned_abs()).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// +1 for p | D, −1 for p | N.
pub fn local_sign(level: &Level, p: u64) -> Result<Sign> {
    if level.d % p == 0 && is_prime(p) {
        Ok(Sign::Plus)
    } else if level.n % p == 0 && is_prime(p) {
        Ok(Sign::Minus)
    } else {
        Err(invalid!("{p} is not a prime divisor of D·N for {level}"))
    }
}

/// Discriminant of Q(√−m) for squarefree m > 1, except that m = 2 gives −4.
pub fn field_discriminant(m: u64) -> Result<QuadDiscriminant> {
    if m <= 1 || !is_squarefree(m) {
        return Err(invalid!("m = {m} must be squarefree and > 1"));
    }
    let d = if m == 2 {
        -4
    } else if m % 4 == 3 {
        -(m as i64)
    } else {
        -4 * m as i64
    };
    QuadDiscriminant::new(d)
}

fn h_of(d: i64) -> u64 {
    class_number(QuadDiscriminant::new(d).expect("valid discriminant"))
}

fn check_divides(level: &Level, m: u64) -> Result<()> {
    if m == 0 || level.dn() % m != 0 {
        return Err(invalid!("m = {m} does not divide D·N for {level}"));
    }
    Ok(())
}

/// Class-number factor of the fixed-point set of ω_m used by the CM bound:
/// 1 for m = 2, h(−4m) for m ≢ 3 (mod 4), and for m ≡ 3 (mod 4) either h(−m)
/// or 2·h(−m) depending on whether CM(−m) and CM(−4m) can be told apart.
pub fn cm_class_factor(level: &Level, m: u64) -> Result<u64> {
    check_divides(level, m)?;
    let mi = m as i64;
    Ok(if m == 2 {
        1
    } else if m % 4 != 3 {
        h_of(-4 * mi)
    } else {
        let small = h_of(-mi);
        let big = h_of(-4 * mi);
        if big > small || level.dn() % 2 == 0 {
            small
        } else {
            2 * small
        }
    })
}

/// `None` when (δ/p) = ε_p for some p | D·N, otherwise the number of p | D·N
/// with (δ/p) = −ε_p.
fn sign_excess_for(level: &Level, delta: i64) -> Option<u64> {
    let mut count = 0;
    for p in level.primes() {
        let eps = local_sign(level, p).expect("p divides DN");
        let k = kronecker(delta, p);
        if k == eps {
            return None;
        }
        if k == -eps {
            count += 1;
        }
    }
    Some(count)
}

/// Exponent of 2 in the size of the fixed-point set of ω_m used by the CM
/// bound; infinite when that set is empty. For m = 2 the minimum is taken
/// over the discriminants −4 and −8 whose CM sets are non-empty.
pub fn cm_sign_excess(level: &Level, m: u64) -> Result<ExtNat> {
    check_divides(level, m)?;
    let branches: Vec<i64> = if m == 2 {
        vec![-4, -8]
    } else if m == 1 {
        vec![-4]
    } else {
        vec![field_discriminant(m)?.value()]
    };
    Ok(branches
        .into_iter()
        .filter_map(|d| sign_excess_for(level, d))
        .min()
        .map_or(ExtNat::Infinite, ExtNat::Finite))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: all (a, b, c) with b² − 4ac = d, reduced, primitive,
    // found by scanning a and c without the a ≤ √(|d|/3) shortcut.
    fn class_number_oracle(d: i64) -> u64 {
        let n = -d;
        let mut count = 0;
        for a in 1..=n {
            for c in a..=n {
                let disc = 4 * a * c - n;
                if disc < 0 {
                    continue;
                }
                let b = (disc as f64).sqrt().round() as i64;
                for b in [b, -b] {
                    if b * b != disc || b.abs() > a {
                        continue;
                    }
                    if b < 0 && (-b == a || a == c) {
                        continue;
                    }
                    if a.gcd(&b.abs()).gcd(&c) == 1 {
                        count += 1;
                    }
                    if b == 0 {
                        break;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-3, 3), Sign::Zero);
        assert_eq!(kronecker(-4, 5), Sign::Plus);
        assert_eq!(kronecker(-3, 2), Sign::Minus);
        assert_eq!(kronecker(-4, 2), Sign::Zero);
        assert_eq!(kronecker(-7, 2), Sign::Plus);
        assert_eq!(kronecker(5, 1), Sign::Plus);
    }

    #[test]
    fn kronecker_matches_legendre_by_squares() {
        for p in [3u64, 5, 7, 11, 13, 41] {
            let squares: Vec<i64> = (1..p as i64).map(|x| x * x % p as i64).collect();
            for d in -60i64..0 {
                let r = d.rem_euclid(p as i64);
                let expect = if r == 0 {
                    Sign::Zero
                } else if squares.contains(&r) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                assert_eq!(kronecker(d, p), expect, "({d}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative() {
        for d in -100i64..=100 {
            for m in 1u64..=100 {
                for n in [1u64, 2, 3, 8, 15, 49, 100] {
                    assert_eq!(
                        kronecker(d, m * n),
                        kronecker(d, m) * kronecker(d, n),
                        "d={d} m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn class_numbers_small() {
        let h = |d| class_number(QuadDiscriminant::new(d).unwrap());
        assert_eq!(h(-3), 1);
        assert_eq!(h(-4), 1);
        assert_eq!(h(-52), 2);
        assert_eq!(h(-20), 2);
        assert_eq!(h(-12), 1);
        assert_eq!(h(-23), 3);
        assert_eq!(h(-163), 1);
    }

    #[test]
    fn class_number_matches_oracle() {
        for d in (-400i64..0).filter(|d| d.rem_euclid(4) <= 1) {
            let qd = QuadDiscriminant::new(d).unwrap();
            if qd.is_fundamental() {
                assert_eq!(class_number(qd), class_number_oracle(d), "h({d})");
            }
        }
        for d in [-12i64, -16, -27, -28, -36, -48, -75, -99] {
            assert_eq!(
                class_number(QuadDiscriminant::new(d).unwrap()),
                class_number_oracle(d)
            );
        }
    }

    #[test]
    fn discriminant_validation() {
        assert!(QuadDiscriminant::new(-5).is_err());
        assert!(QuadDiscriminant::new(-6).is_err());
        assert!(QuadDiscriminant::new(4).is_err());
        let d = QuadDiscriminant::new(-12).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-3, 2));
        let d = QuadDiscriminant::new(-16).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-4, 2));
        let d = QuadDiscriminant::new(-52).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-52, 1));
        let d = QuadDiscriminant::new(-72).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-8, 3));
    }

    #[test]
    fn level_validation() {
        assert!(Level::new(7, 1).is_err());
        assert!(Level::new(1, 1).is_err());
        assert!(Level::new(12, 1).is_err());
        assert!(Level::new(6, 3).is_err());
        assert!(Level::new(6, 4).is_err());
        let l = Level::new(10, 21).unwrap();
        assert_eq!(l.r(), 4);
        assert_eq!(l.primes(), vec![2, 3, 5, 7]);
        assert_eq!(l.atkin_lehner_indices().len(), 15);
    }

    #[test]
    fn local_signs() {
        assert_eq!(
            local_sign(&Level::new(205, 1).unwrap(), 5).unwrap(),
            Sign::Plus
        );
        assert_eq!(
            local_sign(&Level::new(26, 1).unwrap(), 13).unwrap(),
            Sign::Plus
        );
        assert_eq!(
            local_sign(&Level::new(10, 3).unwrap(), 3).unwrap(),
            Sign::Minus
        );
        assert!(local_sign(&Level::new(10, 3).unwrap(), 7).is_err());
    }

    #[test]
    fn field_discriminants() {
        assert_eq!(field_discriminant(2).unwrap().value(), -4);
        assert_eq!(field_discriminant(3).unwrap().value(), -3);
        assert_eq!(field_discriminant(13).unwrap().value(), -52);
        assert_eq!(field_discriminant(7).unwrap().value(), -7);
        assert_eq!(field_discriminant(10).unwrap().value(), -40);
        assert!(field_discriminant(12).is_err());
        for m in (3u64..500).filter(|&m| is_squarefree(m)) {
            let d = field_discriminant(m).unwrap();
            assert!(d.is_fundamental(), "delta_{m}");
            assert!(d.value().rem_euclid(4) <= 1);
        }
    }

    #[test]
    fn class_factor_examples() {
        let l26 = Level::new(26, 1).unwrap();
        assert_eq!(cm_class_factor(&l26, 2).unwrap(), 1);
        assert_eq!(cm_class_factor(&l26, 13).unwrap(), 2);
        let l = Level::new(10, 21).unwrap();
        assert_eq!(cm_class_factor(&l, 3).unwrap(), 1);
        assert!(cm_class_factor(&l26, 3).is_err());
        // 7 ≡ 3 mod 4, h(−28) = h(−7) = 1, 2 ∤ DN
        let l = Level::new(15, 7).unwrap();
        assert_eq!(cm_class_factor(&l, 7).unwrap(), 2);
    }

    #[test]
    fn sign_excess_examples() {
        let l26 = Level::new(26, 1).unwrap();
        assert_eq!(cm_sign_excess(&l26, 13).unwrap(), ExtNat::Finite(0));
        // (−20/41) = +1 = ε_41
        assert_eq!(
            cm_sign_excess(&Level::new(205, 1).unwrap(), 5).unwrap(),
            ExtNat::Infinite
        );
        assert_eq!(
            cm_sign_excess(&Level::new(10, 1).unwrap(), 2).unwrap(),
            ExtNat::Finite(1)
        );
    }

    #[test]
    fn ord2_examples() {
        assert_eq!(ord2(4), ExtNat::Finite(2));
        assert_eq!(ord2(0), ExtNat::Infinite);
        assert_eq!(ord2(12), ExtNat::Finite(2));
        assert!(ExtNat::Infinite > ExtNat::Finite(1000));
        assert_eq!(ExtNat::Infinite + 3, ExtNat::Infinite);
    }
}

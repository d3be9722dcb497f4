use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::algebra::QuaternionAlgebra;
use super::ideal::Ideal;
use super::order::EichlerOrder;
use crate::arith::{is_prime, primes};
use crate::error::{invalid, invariant, Result};
use crate::lattice::{count_exact, left_kernel_mod, Mat4};
use crate::shimura::{eichler_class_number, eichler_mass};

const THETA_LEN: usize = 4;

/// Left ideal classes of a definite Eichler order with their unit weights
/// w_i = |O_r(I_i)^× / {±1}|.
#[derive(Debug, Clone)]
pub struct IdealClassSet {
    order: EichlerOrder,
    classes: Vec<Ideal>,
    weights: Vec<u64>,
    fingerprints: Vec<Vec<u64>>,
}

/// Hecke operator at p on the classes: entry (i, j) counts the sub-ideals of
/// I_i of index p² that are equivalent to I_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtMatrix {
    pub p: u64,
    pub entries: Vec<Vec<u64>>,
}

/// Permutation of the classes induced by the two-sided ideal of norm q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlPermutation {
    pub q: u64,
    pub perm: Vec<usize>,
}

impl BrandtMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn commutes_with(&self, other: &BrandtMatrix) -> bool {
        let a = &self.entries;
        let b = &other.entries;
        let n = a.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let ab: u64 = (0..n).map(|k| a[i][k] * b[k][j]).sum();
                let ba: u64 = (0..n).map(|k| b[i][k] * a[k][j]).sum();
                ab == ba
            })
        })
    }

    /// P M P⁻¹ = M for the permutation matrix of `perm`.
    pub fn is_fixed_by(&self, perm: &[usize]) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[perm[i]][perm[j]] == self.entries[i][j]))
    }

    /// The matrix with classes relabelled: new index k is old index `order[k]`.
    pub fn relabel(&self, order: &[usize]) -> BrandtMatrix {
        let entries = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        BrandtMatrix { p: self.p, entries }
    }
}

impl AlPermutation {
    pub fn is_involution(&self) -> bool {
        self.perm
            .iter()
            .enumerate()
            .all(|(i, &j)| self.perm[j] == i)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl IdealClassSet {
    /// All left ideal classes of the Eichler order of the given discriminant
    /// and level, found by neighbor search at the smallest good prime.
    pub fn new(disc: u64, level: u64) -> Result<IdealClassSet> {
        let order = EichlerOrder::new(QuaternionAlgebra::new(disc)?, level)?;
        IdealClassSet::enumerate(order)
    }

    pub fn enumerate(order: EichlerOrder) -> Result<IdealClassSet> {
        let expected = eichler_class_number(order.disc(), order.level())? as usize;
        let bad = order.disc() * order.level();
        let p0 = primes()
            .find(|&p| bad % p != 0)
            .expect("infinitely many primes") as i128;
        let start = Ideal::unit();
        let mut set = IdealClassSet {
            order,
            classes: Vec::new(),
            weights: Vec::new(),
            fingerprints: Vec::new(),
        };
        set.push(start)?;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let neighbors = set.classes[i].neighbors(p0, &set.order)?;
            for j in neighbors {
                let j = j.reduce(&set.order)?;
                if set.find(&j)?.is_none() {
                    if set.classes.len() == expected {
                        return Err(invariant!(
                            "found more than h = {expected} classes for ({}, {})",
                            set.order.disc(),
                            set.order.level()
                        ));
                    }
                    set.push(j)?;
                    queue.push_back(set.classes.len() - 1);
                }
            }
        }
        if set.classes.len() != expected {
            return Err(invariant!(
                "neighbor search found {} classes, the class number formula gives {expected}",
                set.classes.len()
            ));
        }
        let mass: BigRational = set
            .weights
            .iter()
            .map(|&w| BigRational::new(BigInt::from(1), BigInt::from(2 * w)))
            .sum();
        let expect_mass = eichler_mass(set.order.disc(), set.order.level())?;
        if mass != expect_mass {
            return Err(invariant!(
                "mass {mass} of the classes differs from {expect_mass}"
            ));
        }
        Ok(set)
    }

    fn push(&mut self, ideal: Ideal) -> Result<()> {
        let units = ideal.right_unit_count(&self.order)?;
        if units % 2 != 0 || units == 0 {
            return Err(invariant!("odd unit count {units}"));
        }
        self.fingerprints.push(ideal.theta(&self.order, THETA_LEN)?);
        self.weights.push(units / 2);
        self.classes.push(ideal);
        Ok(())
    }

    fn find(&self, ideal: &Ideal) -> Result<Option<usize>> {
        let fp = ideal.theta(&self.order, THETA_LEN)?;
        for (k, other) in self.classes.iter().enumerate() {
            if self.fingerprints[k] == fp && other.is_equivalent(ideal, &self.order)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Index of the class of `ideal`.
    pub fn classify(&self, ideal: &Ideal) -> Result<usize> {
        let r = ideal.reduce(&self.order)?;
        self.find(&r)?
            .ok_or_else(|| invariant!("ideal does not belong to any enumerated class"))
    }

    pub fn order(&self) -> &EichlerOrder {
        &self.order
    }

    pub fn disc(&self) -> u64 {
        self.order.disc()
    }

    pub fn level(&self) -> u64 {
        self.order.level()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Ideal] {
        &self.classes
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Gram matrix of the norm form n(x)/n(I_i) on I_i (doubled, so x·G·x = 2n(x)/n(I_i)
    /// when divided by n(I_i)).
    pub fn gram(&self, i: usize) -> Result<Mat4> {
        self.classes[i].gram(&self.order)
    }

    /// A copy with the classes listed in a different order and each
    /// representative replaced by the given equivalent ideal.
    pub fn with_representatives(&self, order: &[usize], reps: Vec<Ideal>) -> Result<IdealClassSet> {
        let mut out = IdealClassSet {
            order: self.order.clone(),
            classes: Vec::new(),
            weights: Vec::new(),
            fingerprints: Vec::new(),
        };
        for (&k, rep) in order.iter().zip(reps) {
            if !self.classes[k].is_equivalent(&rep, &self.order)? {
                return Err(invalid!("representative is not in class {k}"));
            }
            out.push(rep)?;
        }
        Ok(out)
    }

    fn check_good_prime(&self, p: u64) -> Result<()> {
        if !is_prime(p) || (self.disc() * self.level()) % p == 0 {
            return Err(invalid!(
                "p = {p} must be a prime not dividing {}",
                self.disc() * self.level()
            ));
        }
        Ok(())
    }

    /// Trace of the Brandt matrix at p, from the diagonal counts alone.
    pub fn brandt_trace(&self, p: u64) -> Result<u64> {
        self.check_good_prime(p)?;
        let o = &self.order;
        let mut total = 0;
        for (c, &w) in self.classes.iter().zip(&self.weights) {
            let prod = c.conj(o)?.mul(c, o)?;
            let count = count_exact(&prod.gram(o)?, 2 * p as i128 * c.norm() * c.norm())?;
            if count % (2 * w) != 0 {
                return Err(invariant!(
                    "diagonal count {count} is not divisible by 2·w = {}",
                    2 * w
                ));
            }
            total += count / (2 * w);
        }
        Ok(total)
    }

    /// Brandt matrix at p by counting y ∈ Ī_i·I_j with n(y) = p·n(I_i)·n(I_j),
    /// normalized by 2·w_j.
    pub fn brandt_matrix(&self, p: u64) -> Result<BrandtMatrix> {
        self.check_good_prime(p)?;
        let h = self.len();
        let o = &self.order;
        let conjs: Vec<Ideal> = self
            .classes
            .iter()
            .map(|c| c.conj(o))
            .collect::<Result<_>>()?;
        let mut counts = vec![vec![0u64; h]; h];
        for i in 0..h {
            for j in i..h {
                let prod = conjs[i].mul(&self.classes[j], o)?;
                let target = 2 * p as i128 * self.classes[i].norm() * self.classes[j].norm();
                let c = count_exact(&prod.gram(o)?, target)?;
                counts[i][j] = c;
                counts[j][i] = c;
            }
        }
        let mut entries = vec![vec![0u64; h]; h];
        for i in 0..h {
            for j in 0..h {
                let w = 2 * self.weights[j];
                if counts[i][j] % w != 0 {
                    return Err(invariant!(
                        "count {} is not divisible by 2·w_{j} = {w}",
                        counts[i][j]
                    ));
                }
                entries[i][j] = counts[i][j] / w;
            }
        }
        let m = BrandtMatrix { p, entries };
        self.check_brandt(&m)?;
        Ok(m)
    }

    /// Brandt matrix at p by classifying the p + 1 neighbors of every class.
    pub fn brandt_matrix_by_neighbors(&self, p: u64) -> Result<BrandtMatrix> {
        self.check_good_prime(p)?;
        let h = self.len();
        let mut entries = vec![vec![0u64; h]; h];
        for i in 0..h {
            for j in self.classes[i].neighbors(p as i128, &self.order)? {
                entries[i][self.classify(&j)?] += 1;
            }
        }
        let m = BrandtMatrix { p, entries };
        self.check_brandt(&m)?;
        Ok(m)
    }

    fn check_brandt(&self, m: &BrandtMatrix) -> Result<()> {
        let h = self.len();
        for i in 0..h {
            let s: u64 = m.entries[i].iter().sum();
            if s != m.p + 1 {
                return Err(invariant!(
                    "row {i} of the Brandt matrix at {} sums to {s}",
                    m.p
                ));
            }
            for j in 0..h {
                if m.entries[i][j] * self.weights[j] != m.entries[j][i] * self.weights[i] {
                    return Err(invariant!(
                        "Brandt matrix at {} is not weight-symmetric at ({i},{j})",
                        m.p
                    ));
                }
            }
        }
        Ok(())
    }

    /// The two-sided ideal of norm q: {x ∈ O : trd(x ȳ) ≡ 0 mod q for all y ∈ O}.
    pub fn two_sided_ideal(&self, q: u64) -> Result<Ideal> {
        let o = &self.order;
        if !is_prime(q) || (o.disc() * o.level()) % q != 0 {
            return Err(invalid!(
                "q = {q} must be a prime dividing {}",
                o.disc() * o.level()
            ));
        }
        let mut gens: Vec<[i128; 4]> = left_kernel_mod(o.trace_gram(), q as i64)
            .iter()
            .map(|v| v.map(|c| c as i128))
            .collect();
        for a in 0..4 {
            gens.push(o.basis_elt(a).map(|c| c * q as i128));
        }
        let p = Ideal::from_gens(&gens)?;
        if p.norm() != q as i128 {
            return Err(invariant!("two-sided ideal at {q} has norm {}", p.norm()));
        }
        Ok(p)
    }

    /// Atkin-Lehner permutation at q | disc·level: I_i ↦ class of P_q·I_i.
    pub fn atkin_lehner(&self, q: u64) -> Result<AlPermutation> {
        let pq = self.two_sided_ideal(q)?;
        let perm = self
            .classes
            .iter()
            .map(|c| self.classify(&pq.mul(c, &self.order)?))
            .collect::<Result<Vec<_>>>()?;
        let w = AlPermutation { q, perm };
        if !w.is_involution() {
            return Err(invariant!(
                "Atkin-Lehner permutation at {q} is not an involution"
            ));
        }
        Ok(w)
    }

    /// Atkin-Lehner permutations for every prime of disc·level, ascending.
    pub fn atkin_lehner_all(&self) -> Result<Vec<AlPermutation>> {
        crate::arith::prime_factors(self.disc() * self.level())
            .into_iter()
            .map(|q| self.atkin_lehner(q))
            .collect()
    }
}

use num_integer::Integer;

use super::algebra::{Quat, QuaternionAlgebra};
use crate::arith::{is_squarefree, prime_factors};
use crate::error::{invalid, invariant, Result};
use crate::lattice::{det, hnf4, intersect4, solve_upper, Mat4};

/// A full-rank lattice (1/den)·L in the algebra, with L ⊂ Z^4 in HNF over the
/// standard basis 1, i, j, k.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatLattice {
    den: i128,
    rows: [[i128; 4]; 4],
}

impl RatLattice {
    pub fn new(den: i128, gens: &[Quat]) -> Result<RatLattice> {
        let gens: Vec<Vec<i128>> = gens.iter().map(|g| g.to_vec()).collect();
        let mut l = RatLattice {
            den,
            rows: hnf4(&gens)?,
        };
        l.normalize();
        Ok(l)
    }

    pub fn standard() -> RatLattice {
        RatLattice {
            den: 1,
            rows: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        }
    }

    fn normalize(&mut self) {
        let mut g = self.den;
        for row in &self.rows {
            for &x in row {
                g = g.gcd(&x);
            }
        }
        if g > 1 {
            self.den /= g;
            for row in self.rows.iter_mut() {
                for x in row.iter_mut() {
                    *x /= g;
                }
            }
        }
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn rows(&self) -> &[[i128; 4]; 4] {
        &self.rows
    }

    fn scaled_rows(&self, to_den: i128) -> Vec<Quat> {
        let f = to_den / self.den;
        self.rows
            .iter()
            .map(|r| [r[0] * f, r[1] * f, r[2] * f, r[3] * f])
            .collect()
    }

    pub fn mul(&self, other: &RatLattice, alg: &QuaternionAlgebra) -> Result<RatLattice> {
        let mut gens = Vec::with_capacity(16);
        for x in &self.rows {
            for y in &other.rows {
                gens.push(alg.mul(x, y));
            }
        }
        RatLattice::new(self.den * other.den, &gens)
    }

    pub fn conj(&self, alg: &QuaternionAlgebra) -> Result<RatLattice> {
        let gens: Vec<Quat> = self.rows.iter().map(|r| alg.conj(r)).collect();
        RatLattice::new(self.den, &gens)
    }

    /// The lattice multiplied by the rational num/den.
    pub fn scale(&self, num: i128, den: i128) -> Result<RatLattice> {
        let gens: Vec<Quat> = self
            .rows
            .iter()
            .map(|r| [r[0] * num, r[1] * num, r[2] * num, r[3] * num])
            .collect();
        RatLattice::new(self.den * den, &gens)
    }

    pub fn add(&self, other: &RatLattice) -> Result<RatLattice> {
        let l = self.den.lcm(&other.den);
        let mut gens = self.scaled_rows(l);
        gens.extend(other.scaled_rows(l));
        RatLattice::new(l, &gens)
    }

    pub fn intersect(&self, other: &RatLattice) -> Result<RatLattice> {
        let l = self.den.lcm(&other.den);
        let a = hnf4(
            &self
                .scaled_rows(l)
                .iter()
                .map(|r| r.to_vec())
                .collect::<Vec<_>>(),
        )?;
        let b = hnf4(
            &other
                .scaled_rows(l)
                .iter()
                .map(|r| r.to_vec())
                .collect::<Vec<_>>(),
        )?;
        let rows = intersect4(&a, &b)?;
        let mut out = RatLattice { den: l, rows };
        out.normalize();
        Ok(out)
    }

    /// Coordinates of x/xden in this lattice's basis, if it belongs to it.
    pub fn coords(&self, x: &Quat, xden: i128) -> Option<[i128; 4]> {
        // x/xden = c·rows/den  ⇔  c·rows = x·den/xden
        let mut v = [0i128; 4];
        for i in 0..4 {
            let num = x[i] * self.den;
            if num % xden != 0 {
                return None;
            }
            v[i] = num / xden;
        }
        solve_upper(&self.rows, &v)
    }

    pub fn contains(&self, other: &RatLattice) -> bool {
        other
            .rows
            .iter()
            .all(|r| self.coords(r, other.den).is_some())
    }

    /// Gram matrix of trd(x ȳ) on the basis, if integral.
    pub fn trace_gram(&self, alg: &QuaternionAlgebra) -> Option<Mat4> {
        let d2 = self.den * self.den;
        let mut g = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let t = alg.trace_pair(&self.rows[i], &self.rows[j]);
                if t % d2 != 0 {
                    return None;
                }
                g[i][j] = i64::try_from(t / d2).ok()?;
            }
        }
        Some(g)
    }

    /// Is every basis element integral (integer reduced trace and norm)?
    fn has_integral_basis(&self, alg: &QuaternionAlgebra) -> bool {
        let d2 = self.den * self.den;
        self.rows
            .iter()
            .all(|r| (2 * r[0]) % self.den == 0 && alg.norm(r) % d2 == 0)
    }
}

fn gram_to_rows(g: &Mat4) -> Vec<Vec<i128>> {
    g.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Reduced discriminant of an order: sqrt |det trd(e_a ē_b)|.
pub fn reduced_disc(l: &RatLattice, alg: &QuaternionAlgebra) -> Result<i128> {
    let g = l
        .trace_gram(alg)
        .ok_or_else(|| invariant!("trace form is not integral"))?;
    let d = det(&gram_to_rows(&g))?;
    isqrt(d.abs()).ok_or_else(|| invariant!("discriminant {d} of an order is not a square"))
}

/// The ring generated by a lattice containing 1, if that ring is an order.
fn ring_closure(l: &RatLattice, alg: &QuaternionAlgebra) -> Result<Option<RatLattice>> {
    let mut cur = l.clone();
    for _ in 0..12 {
        if cur.trace_gram(alg).is_none() || !cur.has_integral_basis(alg) {
            return Ok(None);
        }
        let next = cur.mul(&cur, alg)?;
        if next == cur {
            return Ok(Some(cur));
        }
        cur = next;
    }
    Ok(None)
}

/// A maximal order, obtained by saturating Z⟨1, i, j, k⟩ one prime at a time.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<RatLattice> {
    let target = alg.disc() as i128;
    let mut o = RatLattice::standard();
    loop {
        let rd = reduced_disc(&o, alg)?;
        if rd == target {
            return Ok(o);
        }
        if rd % target != 0 {
            return Err(invariant!(
                "reduced discriminant {rd} is not a multiple of {target}"
            ));
        }
        let ell = prime_factors((rd / target) as u64)[0] as i128;
        let mut grown = None;
        'search: for code in 1..ell.pow(4) {
            let c = [
                code % ell,
                code / ell % ell,
                code / (ell * ell) % ell,
                code / (ell * ell * ell),
            ];
            let mut x = [0i128; 4];
            for (k, row) in o.rows.iter().enumerate() {
                for t in 0..4 {
                    x[t] += c[k] * row[t];
                }
            }
            let xden = o.den * ell;
            if (2 * x[0]) % xden != 0 || alg.norm(&x) % (xden * xden) != 0 {
                continue;
            }
            let mut gens = o.scaled_rows(xden);
            gens.push(x);
            let cand = RatLattice::new(xden, &gens)?;
            if let Some(r) = ring_closure(&cand, alg)? {
                if r != o {
                    grown = Some(r);
                    break 'search;
                }
            }
        }
        o = grown
            .ok_or_else(|| invariant!("could not enlarge an order of reduced discriminant {rd}"))?;
    }
}

/// A definite Eichler order together with its multiplication table in its
/// own integral basis e_0..e_3.
#[derive(Debug, Clone)]
pub struct EichlerOrder {
    algebra: QuaternionAlgebra,
    level: u64,
    lattice: RatLattice,
    mult: [[[i128; 4]; 4]; 4],
    conj: [[i128; 4]; 4],
    trace: Mat4,
    one: [i128; 4],
}

/// Element of an order in its own basis.
pub type Elt = [i128; 4];

impl EichlerOrder {
    pub fn new(algebra: QuaternionAlgebra, level: u64) -> Result<EichlerOrder> {
        if level == 0 || !is_squarefree(level) || level.gcd(&algebra.disc()) != 1 {
            return Err(invalid!(
                "level {level} must be squarefree and coprime to {}",
                algebra.disc()
            ));
        }
        let max = maximal_order(&algebra)?;
        let mut o = max.clone();
        for q in prime_factors(level) {
            let q = q as i128;
            let alpha = isotropic_in(&max, &algebra, q)?;
            let mut gens = Vec::with_capacity(8);
            for r in max.rows() {
                gens.push(algebra.mul(r, &alpha));
            }
            let f = q * max.den();
            for r in max.rows() {
                gens.push([r[0] * f, r[1] * f, r[2] * f, r[3] * f]);
            }
            let j = RatLattice::new(max.den() * max.den(), &gens)?;
            let right = j.conj(&algebra)?.mul(&j, &algebra)?.scale(1, q)?;
            o = o.intersect(&right)?;
        }
        EichlerOrder::from_lattice(algebra, level, o)
    }

    fn from_lattice(
        algebra: QuaternionAlgebra,
        level: u64,
        lattice: RatLattice,
    ) -> Result<EichlerOrder> {
        let rd = reduced_disc(&lattice, &algebra)?;
        let expect = (algebra.disc() * level) as i128;
        if rd != expect {
            return Err(invariant!(
                "Eichler order has reduced discriminant {rd}, expected {expect}"
            ));
        }
        let basis = *lattice.rows();
        let d = lattice.den();
        let coords = |x: &Quat, xden: i128| -> Result<[i128; 4]> {
            lattice
                .coords(x, xden)
                .ok_or_else(|| invariant!("order is not closed under multiplication"))
        };
        let mut mult = [[[0i128; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                mult[a][b] = coords(&algebra.mul(&basis[a], &basis[b]), d * d)?;
            }
        }
        let mut conj = [[0i128; 4]; 4];
        for a in 0..4 {
            conj[a] = coords(&algebra.conj(&basis[a]), d)?;
        }
        let one = coords(&[1, 0, 0, 0], 1)?;
        let trace = lattice
            .trace_gram(&algebra)
            .ok_or_else(|| invariant!("trace form is not integral"))?;
        Ok(EichlerOrder {
            algebra,
            level,
            lattice,
            mult,
            conj,
            trace,
            one,
        })
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.algebra
    }

    pub fn disc(&self) -> u64 {
        self.algebra.disc()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn lattice(&self) -> &RatLattice {
        &self.lattice
    }

    /// Gram matrix of trd(x ȳ) on the basis; the reduced norm is x·T·x/2.
    pub fn trace_gram(&self) -> &Mat4 {
        &self.trace
    }

    pub fn one(&self) -> Elt {
        self.one
    }

    pub fn basis_elt(&self, a: usize) -> Elt {
        let mut e = [0; 4];
        e[a] = 1;
        e
    }

    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let mut out = [0i128; 4];
        for a in 0..4 {
            if x[a] == 0 {
                continue;
            }
            for b in 0..4 {
                if y[b] == 0 {
                    continue;
                }
                let f = x[a] * y[b];
                for c in 0..4 {
                    out[c] += f * self.mult[a][b][c];
                }
            }
        }
        out
    }

    pub fn conj(&self, x: &Elt) -> Elt {
        let mut out = [0i128; 4];
        for a in 0..4 {
            for c in 0..4 {
                out[c] += x[a] * self.conj[a][c];
            }
        }
        out
    }

    pub fn norm(&self, x: &Elt) -> i128 {
        let mut s = 0i128;
        for i in 0..4 {
            for j in 0..4 {
                s += self.trace[i][j] as i128 * x[i] * x[j];
            }
        }
        s / 2
    }

    pub fn trd(&self, x: &Elt) -> i128 {
        let mut s = 0i128;
        for i in 0..4 {
            for j in 0..4 {
                s += self.trace[i][j] as i128 * x[i] * self.one[j];
            }
        }
        s
    }

    /// The element in standard algebra coordinates, as (numerator, denominator).
    pub fn to_algebra(&self, x: &Elt) -> (Quat, i128) {
        let mut v = [0i128; 4];
        for (k, row) in self.lattice.rows().iter().enumerate() {
            for t in 0..4 {
                v[t] += x[k] * row[t];
            }
        }
        (v, self.lattice.den())
    }
}

/// Numerator (over the order's denominator) of some α ∈ O with q | n(α)
/// and α ∉ qO.
fn isotropic_in(o: &RatLattice, alg: &QuaternionAlgebra, q: i128) -> Result<Quat> {
    let d2 = o.den() * o.den();
    for code in 1..q.pow(4) {
        let c = [
            code % q,
            code / q % q,
            code / (q * q) % q,
            code / (q * q * q),
        ];
        let mut x = [0i128; 4];
        for (k, row) in o.rows().iter().enumerate() {
            for t in 0..4 {
                x[t] += c[k] * row[t];
            }
        }
        if (alg.norm(&x) / d2) % q == 0 {
            return Ok(x);
        }
    }
    Err(invariant!("no isotropic vector mod {q}"))
}

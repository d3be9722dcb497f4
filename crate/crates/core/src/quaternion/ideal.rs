use super::order::{EichlerOrder, Elt};
use crate::error::{invariant, Result};
use crate::lattice::{
    count_exact, enumerate, hnf4, index4, shortest, solve_upper, transform_gram, Mat4,
};

/// A full-rank sublattice of an Eichler order O, in HNF over O's basis,
/// together with its reduced norm. Used for left O-ideals and for products
/// such as Ī·J.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    basis: [[i128; 4]; 4],
    norm: i128,
}

fn isqrt_exact(n: i128) -> Option<i128> {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

impl Ideal {
    pub fn unit() -> Ideal {
        Ideal {
            basis: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
            norm: 1,
        }
    }

    /// The lattice spanned by `gens`; its norm is the square root of its index.
    pub fn from_gens(gens: &[Elt]) -> Result<Ideal> {
        let gens: Vec<Vec<i128>> = gens.iter().map(|g| g.to_vec()).collect();
        let basis = hnf4(&gens)?;
        let idx = index4(&basis);
        let norm = isqrt_exact(idx)
            .ok_or_else(|| invariant!("index {idx} of an ideal is not a square"))?;
        Ok(Ideal { basis, norm })
    }

    pub fn basis(&self) -> &[[i128; 4]; 4] {
        &self.basis
    }

    pub fn norm(&self) -> i128 {
        self.norm
    }

    pub fn contains(&self, x: &Elt) -> bool {
        solve_upper(&self.basis, x).is_some()
    }

    pub fn coords(&self, x: &Elt) -> Option<[i128; 4]> {
        solve_upper(&self.basis, x)
    }

    pub fn elt(&self, c: &[i128; 4]) -> Elt {
        let mut x = [0i128; 4];
        for (k, row) in self.basis.iter().enumerate() {
            for t in 0..4 {
                x[t] += c[k] * row[t];
            }
        }
        x
    }

    /// Gram matrix of trd(x ȳ) on the basis; x·G·x = 2 n(x).
    pub fn gram(&self, o: &EichlerOrder) -> Result<Mat4> {
        let mut u = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                u[i][j] = i64::try_from(self.basis[i][j])
                    .map_err(|_| invariant!("ideal basis overflow"))?;
            }
        }
        transform_gram(o.trace_gram(), &u)
    }

    pub fn conj(&self, o: &EichlerOrder) -> Result<Ideal> {
        let gens: Vec<Elt> = self.basis.iter().map(|r| o.conj(r)).collect();
        Ideal::from_gens(&gens)
    }

    pub fn mul(&self, other: &Ideal, o: &EichlerOrder) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(16);
        for x in &self.basis {
            for y in &other.basis {
                gens.push(o.mul(x, y));
            }
        }
        Ideal::from_gens(&gens)
    }

    /// (self · y) / k, which must again lie in O.
    pub fn right_mul_div(&self, y: &Elt, k: i128, o: &EichlerOrder) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(4);
        for x in &self.basis {
            let z = o.mul(x, y);
            if z.iter().any(|c| c % k != 0) {
                return Err(invariant!("right multiple is not integral"));
            }
            gens.push(z.map(|c| c / k));
        }
        Ideal::from_gens(&gens)
    }

    /// An equivalent ideal I·ᾱ/n(I) of smallest norm, α ∈ I minimizing n(α).
    pub fn reduce(&self, o: &EichlerOrder) -> Result<Ideal> {
        let (c, _) = shortest(&self.gram(o)?)?;
        let alpha = self.elt(&c.map(|x| x as i128));
        let r = self.right_mul_div(&o.conj(&alpha), self.norm, o)?;
        Ok(if r.norm <= self.norm { r } else { self.clone() })
    }

    /// Counts of x ∈ I with n(x)/n(I) = m for m = 1..=len.
    pub fn theta(&self, o: &EichlerOrder, len: usize) -> Result<Vec<u64>> {
        let g = self.gram(o)?;
        let mut out = vec![0u64; len];
        let scale = 2 * self.norm;
        enumerate(&g, scale * len as i128, |_, v| {
            if v % scale == 0 {
                out[(v / scale - 1) as usize] += 1;
            }
        })?;
        Ok(out)
    }

    /// Is `other` in the same right class, i.e. other = self·x for some x?
    pub fn is_equivalent(&self, other: &Ideal, o: &EichlerOrder) -> Result<bool> {
        let prod = self.conj(o)?.mul(other, o)?;
        let target = 2 * self.norm * other.norm;
        let g = prod.gram(o)?;
        let mut found = false;
        enumerate(&g, target, |_, v| found |= v == target)?;
        Ok(found)
    }

    /// Elements y ∈ Ī·I with n(y) = n(I)²; y/n(I) runs over O_r(I)^×.
    pub fn right_units(&self, o: &EichlerOrder) -> Result<Vec<Elt>> {
        let prod = self.conj(o)?.mul(self, o)?;
        let g = prod.gram(o)?;
        let target = 2 * self.norm * self.norm;
        let mut out = Vec::new();
        enumerate(&g, target, |c, v| {
            if v == target {
                out.push(prod.elt(&c.map(|x| x as i128)));
            }
        })?;
        Ok(out)
    }

    pub fn right_unit_count(&self, o: &EichlerOrder) -> Result<u64> {
        let prod = self.conj(o)?.mul(self, o)?;
        count_exact(&prod.gram(o)?, 2 * self.norm * self.norm)
    }

    /// The p + 1 left sub-ideals J with pI ⊂ J ⊂ I and [I : J] = p², for a
    /// prime p coprime to disc·level. The order is deterministic.
    pub fn neighbors(&self, p: i128, o: &EichlerOrder) -> Result<Vec<Ideal>> {
        let g = self.gram(o)?;
        let n = self.norm;
        let value = |c: &[i128; 4]| -> i128 {
            let mut s = 0i128;
            for i in 0..4 {
                for j in 0..4 {
                    s += g[i][j] as i128 * c[i] * c[j];
                }
            }
            s / (2 * n)
        };
        let mut alpha = None;
        for code in 1..p.pow(4) {
            let c = [
                code % p,
                code / p % p,
                code / (p * p) % p,
                code / (p * p * p),
            ];
            if value(&c).rem_euclid(p) == 0 {
                alpha = Some(self.elt(&c));
                break;
            }
        }
        let alpha = alpha.ok_or_else(|| invariant!("no isotropic vector mod {p}"))?;
        // α·O_r(I) mod pI is a plane; its lines give the neighbors
        let right = self.conj(o)?.mul(self, o)?;
        let mut span: Vec<[i128; 4]> = Vec::new();
        for y in right.basis() {
            let z = o.mul(&alpha, y);
            if z.iter().any(|c| c % n != 0) {
                return Err(invariant!("α·O_r(I) is not contained in I"));
            }
            let c = self
                .coords(&z.map(|c| c / n))
                .ok_or_else(|| invariant!("α·O_r(I) is not contained in I"))?;
            span.push(c.map(|x| x.rem_euclid(p)));
        }
        let plane = row_echelon_mod(&span, p);
        if plane.len() != 2 {
            return Err(invariant!(
                "right multiples of an isotropic vector span dimension {}",
                plane.len()
            ));
        }
        let mut points: Vec<(i128, i128)> = (0..p).map(|t| (1, t)).collect();
        points.push((0, 1));
        let mut out = Vec::with_capacity(points.len());
        for (s, t) in points {
            let c: [i128; 4] =
                std::array::from_fn(|k| (s * plane[0][k] + t * plane[1][k]).rem_euclid(p));
            let z = self.elt(&c);
            let mut gens: Vec<Elt> = (0..4).map(|a| o.mul(&o.basis_elt(a), &z)).collect();
            for row in &self.basis {
                gens.push(row.map(|x| x * p));
            }
            let j = Ideal::from_gens(&gens)?;
            if j.norm != n * p {
                return Err(invariant!(
                    "neighbor has norm {} instead of {}",
                    j.norm,
                    n * p
                ));
            }
            out.push(j);
        }
        Ok(out)
    }
}

/// Reduced row echelon basis of the span of `rows` over F_p.
fn row_echelon_mod(rows: &[[i128; 4]], p: i128) -> Vec<[i128; 4]> {
    let mut a: Vec<[i128; 4]> = rows.to_vec();
    let mut r = 0;
    for col in 0..4 {
        let Some(s) = (r..a.len()).find(|&i| a[i][col] % p != 0) else {
            continue;
        };
        a.swap(r, s);
        let inv = crate::lattice::mod_inverse((a[r][col] % p) as i64, p as i64) as i128;
        for k in 0..4 {
            a[r][k] = a[r][k] * inv % p;
        }
        for i in 0..a.len() {
            if i != r && a[i][col] != 0 {
                let f = a[i][col];
                for k in 0..4 {
                    a[i][k] = (a[i][k] - f * a[r][k]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

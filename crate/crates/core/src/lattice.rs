//! Integer lattice tools for rank-4 positive definite forms: Hermite normal
//! form, LLL reduction of Gram matrices, and short-vector enumeration.
//!
//! Floating point is only used to steer LLL and to prune the enumeration
//! tree. Every vector returned by [`enumerate`] has its norm checked in exact
//! integer arithmetic, and the pruning radius carries a safety margin, so
//! the result set is exact.

use crate::error::{invariant, Result};

pub type Vec4 = [i64; 4];
pub type Mat4 = [[i64; 4]; 4];

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or_else(|| invariant!("integer overflow in lattice arithmetic"))
}

/// Row-style Hermite normal form of the lattice spanned by `gens` in Z^n.
///
/// Returns the nonzero rows in echelon form: pivots strictly increase, are
/// positive, and entries above each pivot are reduced into `[0, pivot)`.
pub fn hnf(gens: &[Vec<i128>], n: usize) -> Result<Vec<Vec<i128>>> {
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    let mut r = 0;
    for col in 0..n {
        if r == rows.len() {
            break;
        }
        loop {
            // smallest nonzero entry in this column moves to position r
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if rows[i][col] != 0 && best.is_none_or(|b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let pivot = rows[r][col];
            let mut done = true;
            for i in r + 1..rows.len() {
                let q = rows[i][col].div_euclid(pivot);
                if q != 0 {
                    for k in col..n {
                        rows[i][k] = ck(rows[i][k].checked_sub(ck(q.checked_mul(rows[r][k]))?))?;
                    }
                }
                if rows[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        rows.retain(|row| row.iter().any(|&x| x != 0));
        let pivot = rows[r][col];
        for i in 0..r {
            let q = rows[i][col].div_euclid(pivot);
            if q != 0 {
                for k in col..n {
                    rows[i][k] = ck(rows[i][k].checked_sub(ck(q.checked_mul(rows[r][k]))?))?;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    Ok(rows)
}

/// Full-rank rank-4 HNF as a fixed-size matrix.
pub fn hnf4(gens: &[Vec<i128>]) -> Result<[[i128; 4]; 4]> {
    let h = hnf(gens, 4)?;
    if h.len() != 4 || (0..4).any(|i| h[i][i] == 0) {
        return Err(invariant!("lattice is not of full rank 4"));
    }
    let mut out = [[0i128; 4]; 4];
    for i in 0..4 {
        out[i].copy_from_slice(&h[i]);
    }
    Ok(out)
}

/// Coordinates of `v` in an upper triangular basis, if `v` lies in the lattice.
pub fn solve_upper(basis: &[[i128; 4]; 4], v: &[i128; 4]) -> Option<[i128; 4]> {
    let mut rest = *v;
    let mut c = [0i128; 4];
    for i in 0..4 {
        if rest[i] % basis[i][i] != 0 {
            return None;
        }
        c[i] = rest[i] / basis[i][i];
        for k in i..4 {
            rest[k] -= c[i] * basis[i][k];
        }
    }
    Some(c)
}

/// Product of the diagonal of an upper triangular basis: the index in Z^4.
pub fn index4(basis: &[[i128; 4]; 4]) -> i128 {
    (0..4).map(|i| basis[i][i]).product()
}

/// Intersection of two full-rank lattices in Z^4 given by HNF bases.
pub fn intersect4(a: &[[i128; 4]; 4], b: &[[i128; 4]; 4]) -> Result<[[i128; 4]; 4]> {
    // rows (x, y) of [[A, A], [B, 0]] with x = 0 have y ∈ A ∩ B
    let mut gens = Vec::with_capacity(8);
    for row in a {
        gens.push(row.iter().chain(row.iter()).copied().collect::<Vec<_>>());
    }
    for row in b {
        gens.push(row.iter().copied().chain([0; 4]).collect::<Vec<_>>());
    }
    let h = hnf(&gens, 8)?;
    let tail: Vec<Vec<i128>> = h
        .iter()
        .filter(|r| r[..4].iter().all(|&x| x == 0))
        .map(|r| r[4..].to_vec())
        .collect();
    hnf4(&tail)
}

/// Exact x^T G x.
pub fn qform(g: &Mat4, x: &Vec4) -> i128 {
    let mut s = 0i128;
    for i in 0..4 {
        for j in 0..4 {
            s += g[i][j] as i128 * x[i] as i128 * x[j] as i128;
        }
    }
    s
}

/// U G U^T for a transform whose rows are new basis vectors.
pub fn transform_gram(g: &Mat4, u: &Mat4) -> Result<Mat4> {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0i128;
            for k in 0..4 {
                for l in 0..4 {
                    s += u[i][k] as i128 * g[k][l] as i128 * u[j][l] as i128;
                }
            }
            out[i][j] = i64::try_from(s).map_err(|_| invariant!("Gram entry overflow"))?;
        }
    }
    Ok(out)
}

fn gso(g: &Mat4) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut mu = [[0.0; 4]; 4];
    let mut b = [0.0; 4];
    for i in 0..4 {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
    }
    (mu, b)
}

/// LLL-reduce a positive definite Gram matrix. Returns a unimodular `U`
/// (rows are the new basis in old coordinates) and the reduced Gram `U G U^T`.
pub fn lll(g: &Mat4) -> Result<(Mat4, Mat4)> {
    let mut u: Mat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
    let mut cur = *g;
    let mut k = 1;
    let mut steps = 0;
    while k < 4 && steps < 10_000 {
        steps += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&cur);
            let q = mu[k][j].round() as i64;
            if q != 0 {
                for c in 0..4 {
                    u[k][c] -= q * u[j][c];
                }
                cur = transform_gram(g, &u)?;
            }
        }
        let (mu, b) = gso(&cur);
        if b[k] < (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            u.swap(k, k - 1);
            cur = transform_gram(g, &u)?;
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    Ok((u, cur))
}

/// Calls `f(x, x^T G x)` for every nonzero x ∈ Z^4 with x^T G x ≤ bound.
/// Both x and −x are visited. `g` must be positive definite.
pub fn enumerate<F: FnMut(&Vec4, i128)>(g: &Mat4, bound: i128, mut f: F) -> Result<()> {
    if bound <= 0 {
        return Ok(());
    }
    let (u, red) = lll(g)?;
    // Q(y) = Σ q[i][i] (y_i + Σ_{j>i} q[i][j] y_j)²
    let mut q = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            q[i][j] = red[i][j] as f64;
        }
    }
    for i in 0..4 {
        if q[i][i] <= 0.0 {
            return Err(invariant!("Gram matrix is not positive definite"));
        }
        for j in i + 1..4 {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..4 {
            for l in k..4 {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let radius = bound as f64 * (1.0 + 1e-9) + 1e-6;
    let mut y = [0i64; 4];
    search(&q, radius, 3, 0.0, &mut y, &mut |y| {
        if y.iter().all(|&c| c == 0) {
            return;
        }
        let v = qform(&red, y);
        if v <= bound {
            let mut x = [0i64; 4];
            for (k, &yk) in y.iter().enumerate() {
                for c in 0..4 {
                    x[c] += yk * u[k][c];
                }
            }
            f(&x, v);
        }
    });
    Ok(())
}

fn search<F: FnMut(&Vec4)>(
    q: &[[f64; 4]; 4],
    radius: f64,
    i: usize,
    used: f64,
    y: &mut Vec4,
    f: &mut F,
) {
    let center: f64 = -(i + 1..4).map(|j| q[i][j] * y[j] as f64).sum::<f64>();
    let room = (radius - used) / q[i][i];
    if room < 0.0 {
        return;
    }
    let half = room.sqrt();
    let lo = (center - half).ceil() as i64;
    let hi = (center + half).floor() as i64;
    for v in lo..=hi {
        y[i] = v;
        let d = v as f64 - center;
        let used2 = used + q[i][i] * d * d;
        if used2 > radius {
            continue;
        }
        if i == 0 {
            f(y);
        } else {
            search(q, radius, i - 1, used2, y, f);
        }
    }
    y[i] = 0;
}

/// Number of x with x^T G x = t for each t in 1..=max (index t−1).
pub fn theta(g: &Mat4, max: i128) -> Result<Vec<u64>> {
    let mut out = vec![0u64; max as usize];
    enumerate(g, max, |_, v| out[(v - 1) as usize] += 1)?;
    Ok(out)
}

/// Number of x with x^T G x equal to `target`.
pub fn count_exact(g: &Mat4, target: i128) -> Result<u64> {
    let mut n = 0;
    enumerate(g, target, |_, v| {
        if v == target {
            n += 1
        }
    })?;
    Ok(n)
}

/// Some x minimizing x^T G x over nonzero vectors, with its value.
pub fn shortest(g: &Mat4) -> Result<(Vec4, i128)> {
    let (u, red) = lll(g)?;
    let mut best = (u[0], red[0][0] as i128);
    for (i, row) in red.iter().enumerate() {
        if (row[i] as i128) < best.1 {
            best = (u[i], row[i] as i128);
        }
    }
    let bound = best.1;
    enumerate(g, bound, |x, v| {
        if v < best.1 || (v == best.1 && *x > best.0) {
            best = (*x, v);
        }
    })?;
    Ok(best)
}

/// Determinant of an integer matrix by fraction-free elimination.
pub fn det(m: &[Vec<i128>]) -> Result<i128> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = ck(ck(a[i][j].checked_mul(a[k][k]))?
                    .checked_sub(ck(a[i][k].checked_mul(a[k][j]))?))?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Basis of {c ∈ F_q^4 : c·M ≡ 0 (mod q)} for prime q, lifted to [0, q).
pub fn left_kernel_mod(m: &Mat4, q: i64) -> Vec<Vec4> {
    // row-reduce the transpose system M^T c^T = 0
    let mut a: Vec<Vec<i64>> = (0..4)
        .map(|j| (0..4).map(|i| m[i][j].rem_euclid(q)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..4 {
        let Some(s) = (r..4).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, s);
        let inv = mod_inverse(a[r][col], q);
        for k in 0..4 {
            a[r][k] = a[r][k] * inv % q;
        }
        for i in 0..4 {
            if i != r && a[i][col] != 0 {
                let f = a[i][col];
                for k in 0..4 {
                    a[i][k] = (a[i][k] - f * a[r][k]).rem_euclid(q);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..4).filter(|c| !pivots.contains(c)) {
        let mut v = [0i64; 4];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = (-a[row][free]).rem_euclid(q);
        }
        out.push(v);
    }
    out
}

pub fn mod_inverse(a: i64, q: i64) -> i64 {
    let (mut t, mut new_t, mut r, mut new_r) = (0i64, 1i64, q, a.rem_euclid(q));
    while new_r != 0 {
        let quo = r / new_r;
        (t, new_t) = (new_t, t - quo * new_t);
        (r, new_r) = (new_r, r - quo * new_r);
    }
    t.rem_euclid(q)
}

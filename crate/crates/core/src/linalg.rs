//! Linear algebra over the supported rings: dense matrices of ring
//! elements, division-free determinants, Smith normal form over Z,
//! Howell form over Z/n, and a solve/nullspace dispatcher that reduces
//! quotient polynomial rings by restriction of scalars and products
//! componentwise.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingKind, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>, // row-major
}

impl Matrix {
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Matrix {
        let data = vec![ring.zero(); rows * cols];
        Matrix { ring, rows, cols, data }
    }

    pub fn identity(ring: Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring.clone(), n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ring.one();
        }
        m
    }

    pub fn from_rows(ring: Ring, rows: Vec<Vec<RingElement>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { ring, rows: r, cols: c, data }
    }

    pub fn from_cols(ring: Ring, cols: Vec<Vec<RingElement>>) -> Matrix {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = Matrix::zero(ring, r, c);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix columns");
            for (i, v) in col.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &RingElement {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut RingElement {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<RingElement> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<RingElement> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.ring.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = Matrix::zero(self.ring.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a.mul(other.at(k, j));
                    *out.at_mut(i, j) = out.at(i, j).add(&add);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[RingElement]) -> Vec<RingElement> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.ring.clone(), self.rows)
    }

    /// Division-free determinant by dynamic programming over column
    /// subsets; fine for the desk-scale sizes used here.
    pub fn det(&self) -> RingElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return self.ring.one();
        }
        assert!(n <= 20, "determinant size cap exceeded");
        // dp[mask] = signed sum over ways to fill the first popcount(mask)
        // rows using exactly the columns in mask.
        let mut dp = vec![None::<RingElement>; 1 << n];
        dp[0] = Some(self.ring.one());
        for mask in 0usize..(1 << n) {
            let cur = match dp[mask].clone() {
                Some(v) if !v.is_zero() => v,
                _ => continue,
            };
            let row = (mask as u32).count_ones() as usize;
            if row == n {
                continue;
            }
            let mut seen_before = 0u32;
            for j in 0..n {
                let bit = 1usize << j;
                if mask & bit != 0 {
                    seen_before += 1;
                    continue;
                }
                let a = self.at(row, j);
                if a.is_zero() {
                    continue;
                }
                // parity of columns already used that are greater than j
                let used_gt = row as u32 - seen_before;
                let mut term = cur.mul(a);
                if used_gt % 2 == 1 {
                    term = term.neg();
                }
                let slot = &mut dp[mask | bit];
                *slot = Some(match slot.take() {
                    Some(v) => v.add(&term),
                    None => term,
                });
            }
        }
        dp[(1 << n) - 1].take().unwrap_or_else(|| self.ring.zero())
    }

    /// Inverse via the adjugate when the determinant is a unit.
    pub fn try_inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let det_inv = self.det().try_invert()?;
        let mut adj = Matrix::zero(self.ring.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ij goes to adj[j][i]
                let minor = self.minor(i, j);
                let mut c = minor.det();
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                *adj.at_mut(j, i) = c.mul(&det_inv);
            }
        }
        Some(adj)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix {
        let mut rows = Vec::with_capacity(self.rows - 1);
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            let mut row = Vec::with_capacity(self.cols - 1);
            for j in 0..self.cols {
                if j == skip_col {
                    continue;
                }
                row.push(self.at(i, j).clone());
            }
            rows.push(row);
        }
        Matrix::from_rows(self.ring.clone(), rows)
    }
}

/// Any solution of A x = b, or None when the system is inconsistent.
pub fn solve(a: &Matrix, b: &[RingElement]) -> Result<Option<Vec<RingElement>>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    match a.ring().kind() {
        RingKind::Integers => Ok(solve_integers(a, b)),
        RingKind::IntegersMod(n) => Ok(solve_mod(a, b, n)),
        RingKind::Product(factors) => {
            let mut parts: Vec<Vec<RingElement>> = Vec::with_capacity(factors.len());
            for (idx, _f) in factors.iter().enumerate() {
                let (ai, bi) = project_system(a, b, idx);
                match solve(&ai, &bi)? {
                    Some(sol) => parts.push(sol),
                    None => return Ok(None),
                }
            }
            let ring = a.ring();
            let mut out = Vec::with_capacity(a.cols());
            for j in 0..a.cols() {
                let comps: Vec<RingElement> = parts.iter().map(|p| p[j].clone()).collect();
                out.push(ring.tuple(comps)?);
            }
            Ok(Some(out))
        }
        RingKind::QuotientPoly { base, modulus } => {
            let deg = modulus.len() - 1;
            let (blown, rhs) = blow_up_system(a, b, base, deg);
            match solve(&blown, &rhs)? {
                None => Ok(None),
                Some(sol) => {
                    let mut out = Vec::with_capacity(a.cols());
                    for j in 0..a.cols() {
                        let coeffs: Vec<RingElement> =
                            (0..deg).map(|k| sol[j * deg + k].clone()).collect();
                        out.push(a.ring().poly_from_coeffs(coeffs)?);
                    }
                    Ok(Some(out))
                }
            }
        }
    }
}

/// Generators of {x | A x = 0}; complete over the supported rings.
pub fn nullspace(a: &Matrix) -> Result<Vec<Vec<RingElement>>> {
    match a.ring().kind() {
        RingKind::Integers => Ok(nullspace_integers(a)),
        RingKind::IntegersMod(n) => Ok(nullspace_mod(a, n)),
        RingKind::Product(factors) => {
            let ring = a.ring();
            let mut out = Vec::new();
            for (idx, f) in factors.iter().enumerate() {
                let (ai, _) = project_system(a, &vec![ring.zero(); a.rows()], idx);
                for gen in nullspace(&ai)? {
                    // embed the factor solution, zero elsewhere
                    let mut vec_out = Vec::with_capacity(a.cols());
                    for j in 0..a.cols() {
                        let comps: Vec<RingElement> = factors
                            .iter()
                            .enumerate()
                            .map(|(k, fk)| if k == idx { gen[j].clone() } else { fk.zero() })
                            .collect();
                        vec_out.push(ring.tuple(comps)?);
                    }
                    let _ = f;
                    out.push(vec_out);
                }
            }
            Ok(out)
        }
        RingKind::QuotientPoly { base, modulus } => {
            let deg = modulus.len() - 1;
            let zeros = vec![a.ring().zero(); a.rows()];
            let (blown, _) = blow_up_system(a, &zeros, base, deg);
            let gens = nullspace(&blown)?;
            let mut out = Vec::new();
            for g in gens {
                let mut vec_out = Vec::with_capacity(a.cols());
                for j in 0..a.cols() {
                    let coeffs: Vec<RingElement> =
                        (0..deg).map(|k| g[j * deg + k].clone()).collect();
                    vec_out.push(a.ring().poly_from_coeffs(coeffs)?);
                }
                if vec_out.iter().any(|c| !c.is_zero()) {
                    out.push(vec_out);
                }
            }
            Ok(out)
        }
    }
}

/// Is `target` an R-linear combination of `gens`?
pub fn in_span(ring: &Ring, gens: &[Vec<RingElement>], target: &[RingElement]) -> Result<bool> {
    if target.iter().all(|c| c.is_zero()) {
        return Ok(true);
    }
    if gens.is_empty() {
        return Ok(false);
    }
    let m = Matrix::from_cols(ring.clone(), gens.to_vec());
    Ok(solve(&m, target)?.is_some())
}

/// Greedy reduction of a generating family to one with no redundant member.
pub fn reduce_generators(ring: &Ring, gens: &[Vec<RingElement>]) -> Result<Vec<Vec<RingElement>>> {
    let mut kept: Vec<Vec<RingElement>> = Vec::new();
    for g in gens {
        if g.iter().all(|c| c.is_zero()) {
            continue;
        }
        if !in_span(ring, &kept, g)? {
            kept.push(g.clone());
        }
    }
    Ok(kept)
}

/// Mutual containment of two spans, decided by membership of generators.
pub fn spans_equal(
    ring: &Ring,
    a: &[Vec<RingElement>],
    b: &[Vec<RingElement>],
) -> Result<bool> {
    for g in a {
        if !in_span(ring, b, g)? {
            return Ok(false);
        }
    }
    for g in b {
        if !in_span(ring, a, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn project_system(a: &Matrix, b: &[RingElement], idx: usize) -> (Matrix, Vec<RingElement>) {
    let ring = a.ring();
    let factors = ring.factors().expect("project_system on non-product");
    let f = factors[idx].clone();
    let mut m = Matrix::zero(f.clone(), a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            *m.at_mut(i, j) = ring.project(a.at(i, j), idx);
        }
    }
    let rhs = b.iter().map(|x| ring.project(x, idx)).collect();
    (m, rhs)
}

/// Restriction of scalars: replace every entry of an R-system, for
/// R = base[X]/(m) free of rank `deg` over base, by the multiplication
/// matrix on the power basis.
fn blow_up_system(
    a: &Matrix,
    b: &[RingElement],
    base: &Ring,
    deg: usize,
) -> (Matrix, Vec<RingElement>) {
    let ring = a.ring().clone();
    let mut big = Matrix::zero(base.clone(), a.rows() * deg, a.cols() * deg);
    let x = ring.poly_gen().expect("blow_up on non-quotient ring");
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let entry = a.at(i, j);
            // column k of the block: entry * X^k expressed in the power basis
            let mut shifted = entry.clone();
            for k in 0..deg {
                let coeffs = poly_coeffs(base, &shifted);
                for (r, c) in coeffs.into_iter().enumerate() {
                    *big.at_mut(i * deg + r, j * deg + k) = c;
                }
                if k + 1 < deg {
                    shifted = shifted.mul(&x);
                }
            }
        }
    }
    let mut rhs = Vec::with_capacity(b.len() * deg);
    for v in b {
        rhs.extend(poly_coeffs(base, v));
    }
    (big, rhs)
}

fn poly_coeffs(base: &Ring, v: &RingElement) -> Vec<RingElement> {
    match v.value() {
        Value::Poly(cs) => cs
            .iter()
            .map(|c| poly_coeff_elem(base, c))
            .collect(),
        _ => panic!("poly_coeffs on a non-polynomial value"),
    }
}

fn poly_coeff_elem(base: &Ring, c: &Value) -> RingElement {
    // Rebuild a base-ring element from a raw canonical value.
    match (base.kind(), c) {
        (RingKind::Integers, Value::Int(i)) | (RingKind::IntegersMod(_), Value::Int(i)) => {
            base.from_bigint(i.clone())
        }
        (RingKind::QuotientPoly { base: inner, .. }, Value::Poly(cs)) => {
            let coeffs: Vec<RingElement> = cs.iter().map(|v| poly_coeff_elem(inner, v)).collect();
            base.poly_from_coeffs(coeffs).expect("canonical coefficients")
        }
        (RingKind::Product(fs), Value::Tuple(ps)) => {
            let parts: Vec<RingElement> =
                fs.iter().zip(ps.iter()).map(|(f, p)| poly_coeff_elem(f, p)).collect();
            base.tuple(parts).expect("canonical components")
        }
        _ => unreachable!("canonical value shape mismatch"),
    }
}

// ---------------------------------------------------------------------------
// Integer matrices: Smith normal form.
// ---------------------------------------------------------------------------

fn to_bigint_matrix(a: &Matrix) -> Vec<Vec<BigInt>> {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| match a.at(i, j).value() {
                    Value::Int(v) => v.clone(),
                    _ => panic!("integer matrix expected"),
                })
                .collect()
        })
        .collect()
}

pub struct Smith {
    pub d: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>, // rows transform: u * a * v = d
    pub v: Vec<Vec<BigInt>>,
}

/// Smith normal form with both transforms, U A V = D diagonal.
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> Smith {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let swap_rows = |d: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        d.swap(a, b);
        u.swap(a, b);
    };
    let swap_cols = |d: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in d.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    };
    // row[a] -= q * row[b]
    let row_op = |d: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize, q: &BigInt| {
        for j in 0..cols {
            let t = &d[b][j] * q;
            d[a][j] -= t;
        }
        for j in 0..rows {
            let t = &u[b][j] * q;
            u[a][j] -= t;
        }
    };
    let col_op = |d: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, a: usize, b: usize, q: &BigInt| {
        for row in d.iter_mut() {
            let t = &row[b] * q;
            row[a] -= t;
        }
        for row in v.iter_mut() {
            let t = &row[b] * q;
            row[a] -= t;
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        // find a pivot: smallest nonzero |entry| in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => d[i][j].abs() < d[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        swap_rows(&mut d, &mut u, t, pi);
        swap_cols(&mut d, &mut v, t, pj);
        loop {
            let mut clean = true;
            for i in (t + 1)..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&d[i][t], &d[t][t]);
                row_op(&mut d, &mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    swap_rows(&mut d, &mut u, t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&d[t][j], &d[t][t]);
                col_op(&mut d, &mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, &mut v, t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if d[t][t].is_negative() {
            for j in 0..cols {
                d[t][j] = -d[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
    }
    // Diagonal with both transforms; the divisibility chain is not needed
    // by the solver or the nullspace reads.
    Smith { d, u, v }
}

#[cfg(test)]
fn mat_mul_big(a: &[Vec<BigInt>], b: &[Vec<BigInt>], n: usize, k: usize, m: usize) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                let add = &a[i][t] * &b[t][j];
                out[i][j] += add;
            }
        }
    }
    out
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer division keeps entries small
    let (q, r) = a.div_rem(b);
    if r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn solve_integers(a: &Matrix, b: &[RingElement]) -> Option<Vec<RingElement>> {
    let ring = a.ring();
    let big = to_bigint_matrix(a);
    let smith = smith_normal_form(&big);
    let rows = a.rows();
    let cols = a.cols();
    let bb: Vec<BigInt> = b
        .iter()
        .map(|x| match x.value() {
            Value::Int(v) => v.clone(),
            _ => panic!("integer rhs expected"),
        })
        .collect();
    let c: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|j| &smith.u[i][j] * &bb[j]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let di = if i < cols { smith.d[i][i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !c[i].is_zero() {
                return None;
            }
        } else {
            let (q, r) = c[i].div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    let x: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|j| &smith.v[i][j] * &y[j]).sum())
        .collect();
    Some(x.into_iter().map(|v| ring.from_bigint(v)).collect())
}

fn nullspace_integers(a: &Matrix) -> Vec<Vec<RingElement>> {
    let ring = a.ring();
    let big = to_bigint_matrix(a);
    let smith = smith_normal_form(&big);
    let cols = a.cols();
    let mut out = Vec::new();
    for j in 0..cols {
        let dj = if j < a.rows() { smith.d[j][j].clone() } else { BigInt::zero() };
        if dj.is_zero() {
            let gen: Vec<RingElement> =
                (0..cols).map(|i| ring.from_bigint(smith.v[i][j].clone())).collect();
            if gen.iter().any(|g| !g.is_zero()) {
                out.push(gen);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Z/n matrices: Howell form.
// ---------------------------------------------------------------------------

/// Row Howell form of a matrix over Z/n.  Rows span the same module as the
/// input; the form supports exact membership tests and kernel reads.
pub struct Howell {
    pub n: BigInt,
    pub rows: Vec<Vec<BigInt>>, // canonical rows, pivot structure left-to-right
    pub pivots: Vec<usize>,     // pivot column of each row
}

pub fn howell_form(n: &BigInt, input: Vec<Vec<BigInt>>) -> Howell {
    let cols = input.first().map_or(0, |r| r.len());
    let reduce = |v: &BigInt| -> BigInt { v.mod_floor(n) };
    // one optional installed row per pivot column
    let mut installed: Vec<Option<Vec<BigInt>>> = vec![None; cols];
    let mut queue: std::collections::VecDeque<Vec<BigInt>> = input
        .into_iter()
        .map(|r| r.into_iter().map(|v| reduce(&v)).collect())
        .collect();

    // annihilator shift of an installed row: (n / gcd(pivot, n)) * row has a
    // zero pivot and support strictly to the right
    let shift_of = |row: &[BigInt], c: usize, n: &BigInt| -> Option<Vec<BigInt>> {
        let g = row[c].gcd(n);
        let ann = n / &g;
        if ann.is_one() {
            return None;
        }
        let shifted: Vec<BigInt> = row.iter().map(|v| (v * &ann).mod_floor(n)).collect();
        if shifted.iter().any(|v| !v.is_zero()) {
            Some(shifted)
        } else {
            None
        }
    };

    while let Some(mut row) = queue.pop_front() {
        let mut c = match row.iter().position(|v| !v.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        loop {
            match installed[c].take() {
                None => {
                    if let Some(s) = shift_of(&row, c, n) {
                        queue.push_back(s);
                    }
                    installed[c] = Some(row);
                    break;
                }
                Some(existing) => {
                    let a = existing[c].clone();
                    let b = row[c].clone();
                    let ext = a.extended_gcd(&b);
                    let (g, s, t) = (ext.gcd, ext.x, ext.y);
                    let (af, bf) = (&a / &g, &b / &g);
                    // unimodular transform [s t; bf -af] of the row pair
                    let mut new_pivot = Vec::with_capacity(cols);
                    let mut remainder = Vec::with_capacity(cols);
                    for j in 0..cols {
                        let x = &existing[j];
                        let y = &row[j];
                        new_pivot.push(reduce(&(&s * x + &t * y)));
                        remainder.push(reduce(&(&bf * x - &af * y)));
                    }
                    debug_assert!(remainder[c].is_zero());
                    let pivot_changed = new_pivot != existing;
                    if pivot_changed {
                        if let Some(sh) = shift_of(&new_pivot, c, n) {
                            queue.push_back(sh);
                        }
                    }
                    installed[c] = Some(new_pivot);
                    row = remainder;
                    match row.iter().position(|v| !v.is_zero()) {
                        Some(next) => c = next,
                        None => break,
                    }
                }
            }
        }
    }

    // normalize: scale pivots to canonical divisors of n, clear above
    let mut rows_sorted: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..cols {
        if let Some(row) = installed[c].take() {
            pivots.push(c);
            rows_sorted.push(row);
        }
    }
    for idx in 0..rows_sorted.len() {
        let c = pivots[idx];
        let g = rows_sorted[idx][c].gcd(n);
        let u = unit_scaling(n, &rows_sorted[idx][c], &g);
        for j in 0..cols {
            rows_sorted[idx][j] = reduce(&(&rows_sorted[idx][j] * &u));
        }
        debug_assert_eq!(rows_sorted[idx][c], g);
        for i in 0..idx {
            if rows_sorted[i][c].is_zero() {
                continue;
            }
            let q = rows_sorted[i][c].div_floor(&g);
            if q.is_zero() {
                continue;
            }
            for j in 0..cols {
                let t = &rows_sorted[idx][j] * &q;
                rows_sorted[i][j] = reduce(&(&rows_sorted[i][j] - t));
            }
        }
    }
    Howell { n: n.clone(), rows: rows_sorted, pivots }
}

/// Find a unit u mod n with u*a = g (mod n), where g = gcd(a, n).
fn unit_scaling(n: &BigInt, a: &BigInt, g: &BigInt) -> BigInt {
    let ad = a / g;
    let nd = n / g;
    // ad is invertible mod nd; lift to a unit mod n by CRT-style search:
    // u = inv(ad) mod nd + k*nd for the first k making gcd(u, n) = 1.
    let ext = ad.extended_gcd(&nd);
    let mut u = ext.x.mod_floor(&nd);
    if u.is_zero() {
        u = nd.clone();
    }
    loop {
        if u.gcd(n).is_one() {
            return u;
        }
        u += &nd;
    }
}

impl Howell {
    /// Reduce `target` against the form.  Returns the residual vector and
    /// the combination coefficients used (aligned with self.rows).
    pub fn reduce_with_combination(&self, target: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut t: Vec<BigInt> = target.iter().map(|v| v.mod_floor(&self.n)).collect();
        let mut combo = vec![BigInt::zero(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let c = self.pivots[i];
            if t[c].is_zero() {
                continue;
            }
            let g = &row[c];
            let (q, r) = t[c].div_rem(g);
            if r.is_zero() {
                combo[i] = q.clone();
                for j in 0..t.len() {
                    let sub = &row[j] * &q;
                    t[j] = (&t[j] - sub).mod_floor(&self.n);
                }
            }
        }
        (t, combo)
    }
}

fn solve_mod(a: &Matrix, b: &[RingElement], n: &BigUint) -> Option<Vec<RingElement>> {
    let ring = a.ring();
    let n = BigInt::from(n.clone());
    let k = a.cols();
    let m = a.rows();
    // rows of [A^T | I_k]; a row combination u gives (u A^T | u), and
    // u A^T = b^T solves A u^T = b.
    let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut row = Vec::with_capacity(m + k);
        for i in 0..m {
            row.push(match a.at(i, j).value() {
                Value::Int(v) => v.clone(),
                _ => panic!("integer entries expected"),
            });
        }
        for t in 0..k {
            row.push(if t == j { BigInt::one() } else { BigInt::zero() });
        }
        aug.push(row);
    }
    let how = howell_form(&n, aug);
    let mut target: Vec<BigInt> = b
        .iter()
        .map(|x| match x.value() {
            Value::Int(v) => v.clone(),
            _ => panic!("integer rhs expected"),
        })
        .collect();
    target.extend(std::iter::repeat(BigInt::zero()).take(k));
    // only reduce using pivots inside the first m columns
    let mut t: Vec<BigInt> = target.iter().map(|v| v.mod_floor(&n)).collect();
    for (i, row) in how.rows.iter().enumerate() {
        let c = how.pivots[i];
        if c >= m {
            break;
        }
        if t[c].is_zero() {
            continue;
        }
        let g = &row[c];
        let (q, r) = t[c].div_rem(g);
        if !r.is_zero() {
            return None;
        }
        for j in 0..(m + k) {
            let sub = &row[j] * &q;
            t[j] = (&t[j] - sub).mod_floor(&n);
        }
    }
    if t[..m].iter().any(|v| !v.is_zero()) {
        return None;
    }
    // the tail now holds -u, and x = u^T
    let x: Vec<RingElement> = (m..m + k).map(|j| ring.from_bigint(-t[j].clone())).collect();
    Some(x)
}

fn nullspace_mod(a: &Matrix, n: &BigUint) -> Vec<Vec<RingElement>> {
    let ring = a.ring();
    let n = BigInt::from(n.clone());
    let k = a.cols();
    let m = a.rows();
    let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut row = Vec::with_capacity(m + k);
        for i in 0..m {
            row.push(match a.at(i, j).value() {
                Value::Int(v) => v.clone(),
                _ => panic!("integer entries expected"),
            });
        }
        for t in 0..k {
            row.push(if t == j { BigInt::one() } else { BigInt::zero() });
        }
        aug.push(row);
    }
    let how = howell_form(&n, aug);
    let mut out = Vec::new();
    for (i, row) in how.rows.iter().enumerate() {
        if how.pivots[i] >= m {
            let gen: Vec<RingElement> =
                (m..m + k).map(|j| ring.from_bigint(row[j].clone())).collect();
            if gen.iter().any(|g| !g.is_zero()) {
                out.push(gen);
            }
        }
    }
    out
}

/// Exhaustive solver used as an independent oracle in tests: enumerates
/// all candidate vectors over a finite ring.
pub fn solve_exhaustive(a: &Matrix, b: &[RingElement]) -> Result<Option<Vec<RingElement>>> {
    let ring = a.ring();
    for x in all_vectors(ring, a.cols())? {
        if a.mul_vec(&x) == b {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// All coordinate vectors of given length over a finite ring.
pub fn all_vectors(ring: &Ring, len: usize) -> Result<Vec<Vec<RingElement>>> {
    let elems = ring.elements()?;
    let total = elems.len().checked_pow(len as u32).ok_or_else(|| {
        Error::BudgetExceeded("vector enumeration overflow".into())
    })?;
    if total > crate::ring::ENUM_CAP {
        return Err(Error::BudgetExceeded(format!(
            "{} vectors exceed enumeration cap",
            total
        )));
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; len];
    loop {
        out.push(idx.iter().map(|&i| elems[i].clone()).collect());
        let mut p = 0;
        loop {
            if p == len {
                return Ok(out);
            }
            idx[p] += 1;
            if idx[p] < elems.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::integers()
    }
    fn zn(n: u64) -> Ring {
        Ring::integers_mod(n).unwrap()
    }

    fn elem_row(r: &Ring, vals: &[i64]) -> Vec<RingElement> {
        vals.iter().map(|&v| r.from_i64(v)).collect()
    }

    #[test]
    fn solve_identity() {
        for ring in [z(), zn(6), zn(7)] {
            let a = Matrix::identity(ring.clone(), 3);
            let b = elem_row(&ring, &[1, 4, 5]);
            assert_eq!(solve(&a, &b).unwrap(), Some(b));
        }
    }

    #[test]
    fn nullspace_examples() {
        // nullspace of [2] over Z/6 is generated by 3
        let r = zn(6);
        let a = Matrix::from_rows(r.clone(), vec![elem_row(&r, &[2])]);
        let ns = nullspace(&a).unwrap();
        assert!(spans_equal(&r, &ns, &[vec![r.from_i64(3)]]).unwrap());

        // nullspace of [[0,0],[0,2]] over Z is generated by (1,0)
        let zi = z();
        let a = Matrix::from_rows(zi.clone(), vec![elem_row(&zi, &[0, 0]), elem_row(&zi, &[0, 2])]);
        let ns = nullspace(&a).unwrap();
        assert!(spans_equal(&zi, &ns, &[elem_row(&zi, &[1, 0])]).unwrap());
    }

    #[test]
    fn solve_substitution_property() {
        // solve results check out by substitution across ring kinds
        let rings: Vec<Ring> = vec![z(), zn(4), zn(6), zn(9)];
        for ring in rings {
            let a = Matrix::from_rows(
                ring.clone(),
                vec![elem_row(&ring, &[2, 1, 0]), elem_row(&ring, &[1, 3, 2])],
            );
            let b = elem_row(&ring, &[1, 2]);
            if let Some(x) = solve(&a, &b).unwrap() {
                assert_eq!(a.mul_vec(&x), b);
            }
            for g in nullspace(&a).unwrap() {
                assert!(a.mul_vec(&g).iter().all(|v| v.is_zero()));
            }
        }
    }

    #[test]
    fn mod_solver_matches_exhaustive() {
        // count of kernel elements matches brute force over small systems
        for n in [4u64, 6] {
            let r = zn(n);
            let mats = [
                vec![vec![2, 0], vec![0, 3]],
                vec![vec![2, 4], vec![1, 2]],
                vec![vec![0, 0], vec![0, 2]],
            ];
            for m in &mats {
                let a = Matrix::from_rows(
                    r.clone(),
                    m.iter().map(|row| elem_row(&r, &row.iter().map(|&v| v as i64).collect::<Vec<_>>())).collect(),
                );
                let gens = nullspace(&a).unwrap();
                let brute: Vec<Vec<RingElement>> = all_vectors(&r, 2)
                    .unwrap()
                    .into_iter()
                    .filter(|x| a.mul_vec(x).iter().all(|v| v.is_zero()))
                    .collect();
                for x in &brute {
                    assert!(in_span(&r, &gens, x).unwrap(), "missing kernel vector");
                }
                for g in &gens {
                    assert!(a.mul_vec(g).iter().all(|v| v.is_zero()));
                }
                // solvability agrees with brute force on a few rhs
                for b in all_vectors(&r, 2).unwrap().into_iter().take(12) {
                    let fast = solve(&a, &b).unwrap().is_some();
                    let slow = solve_exhaustive(&a, &b).unwrap().is_some();
                    assert_eq!(fast, slow);
                }
            }
        }
    }

    #[test]
    fn quotient_ring_solver() {
        // (Z/2)[X]/(X^2): solve and nullspace through restriction of scalars
        let base = zn(2);
        let r = Ring::quotient_poly(
            base.clone(),
            vec![base.zero(), base.zero(), base.one()],
        )
        .unwrap();
        let x = r.poly_gen().unwrap();
        let a = Matrix::from_rows(r.clone(), vec![vec![x.clone()]]);
        // X * t = X has solution t = 1
        let sol = solve(&a, &[x.clone()]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&sol), vec![x.clone()]);
        // X * t = 1 has none (X is nilpotent)
        assert!(solve(&a, &[r.one()]).unwrap().is_none());
        // kernel of X is spanned by X
        let ns = nullspace(&a).unwrap();
        assert!(spans_equal(&r, &ns, &[vec![x.clone()]]).unwrap());
    }

    #[test]
    fn product_ring_solver() {
        let p = Ring::product(vec![zn(3), zn(5)]).unwrap();
        let two = p.from_i64(2);
        let a = Matrix::from_rows(p.clone(), vec![vec![two.clone()]]);
        let sol = solve(&a, &[p.one()]).unwrap().unwrap();
        assert_eq!(two.mul(&sol[0]), p.one());
    }

    #[test]
    fn determinant_small() {
        let r = z();
        let m = Matrix::from_rows(
            r.clone(),
            vec![elem_row(&r, &[1, 2]), elem_row(&r, &[3, 4])],
        );
        assert_eq!(m.det(), r.from_i64(-2));
        let id = Matrix::identity(zn(6), 3);
        assert_eq!(id.det(), zn(6).one());
        // 3x3 with a known determinant
        let m = Matrix::from_rows(
            r.clone(),
            vec![
                elem_row(&r, &[2, 0, 1]),
                elem_row(&r, &[1, 1, 0]),
                elem_row(&r, &[0, 3, 1]),
            ],
        );
        assert_eq!(m.det(), r.from_i64(5));
    }

    #[test]
    fn inverse_roundtrip() {
        let r = zn(7);
        let m = Matrix::from_rows(
            r.clone(),
            vec![elem_row(&r, &[1, 2]), elem_row(&r, &[3, 4])],
        );
        let inv = m.try_inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn smith_randomish() {
        // U A V = D on a handful of fixed matrices
        let cases = vec![
            vec![vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]],
            vec![vec![0, 0], vec![0, 2]],
            vec![vec![1, 2, 3], vec![4, 5, 6]],
        ];
        for case in cases {
            let a: Vec<Vec<BigInt>> = case
                .iter()
                .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            let s = smith_normal_form(&a);
            let rows = a.len();
            let cols = a[0].len();
            let ua = mat_mul_big(&s.u, &a, rows, rows, cols);
            let uav = mat_mul_big(&ua, &s.v, rows, cols, cols);
            assert_eq!(uav, s.d);
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        assert!(s.d[i][j].is_zero(), "off-diagonal in SNF");
                    }
                }
            }
        }
    }
}

//! Smith normal form over the integers, with transforms.
//!
//! Pivoting rule: the smallest nonzero absolute value in the remaining
//! block, cleared by row operations before column operations. Only the
//! diagonal is canonical; `U` and `V` are reproducible for a given input.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnfError {
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("rows have different lengths")]
    Ragged,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, SnfError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SnfError::Ragged);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, SnfError> {
        if self.cols != other.rows {
            return Err(SnfError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self[(i, k)]
                        .checked_mul(other[(k, j)])
                        .ok_or(SnfError::Overflow)?;
                    acc = acc.checked_add(term).ok_or(SnfError::Overflow)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, SnfError> {
        let col = IntMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        };
        Ok(self.mul(&col)?.data)
    }

    /// Entries `(i, i)`, `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += factor * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, factor: i64) -> Result<(), SnfError> {
        for j in 0..self.cols {
            let v = self[(src, j)]
                .checked_mul(factor)
                .and_then(|t| t.checked_add(self[(dst, j)]))
                .ok_or(SnfError::Overflow)?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// `col[dst] += factor * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, factor: i64) -> Result<(), SnfError> {
        for i in 0..self.rows {
            let v = self[(i, src)]
                .checked_mul(factor)
                .and_then(|t| t.checked_add(self[(i, dst)]))
                .ok_or(SnfError::Overflow)?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<(), SnfError> {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].checked_neg().ok_or(SnfError::Overflow)?;
        }
        Ok(())
    }

    fn negate_col(&mut self, j: usize) -> Result<(), SnfError> {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].checked_neg().ok_or(SnfError::Overflow)?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    /// `a,b;c,d`, the same syntax the command line accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&rows.join(";"))
    }
}

/// `u * a * v == s`, with `u`, `v` unimodular and `s` diagonal with
/// nonnegative entries `d_1 | d_2 | ...`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, maintained alongside it.
    pub u_inv: IntMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.s.diagonal()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.s.diagonal().iter().filter(|&&d| d != 0).count()
    }
}

struct Elimination {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Elimination {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, factor: i64) -> Result<(), SnfError> {
        self.a.add_row(dst, src, factor)?;
        self.u.add_row(dst, src, factor)?;
        let neg = factor.checked_neg().ok_or(SnfError::Overflow)?;
        self.u_inv.add_col(src, dst, neg)
    }

    fn add_col(&mut self, dst: usize, src: usize, factor: i64) -> Result<(), SnfError> {
        self.a.add_col(dst, src, factor)?;
        self.v.add_col(dst, src, factor)
    }

    fn negate_row(&mut self, i: usize) -> Result<(), SnfError> {
        self.a.negate_row(i)?;
        self.u.negate_row(i)?;
        self.u_inv.negate_col(i)
    }

    /// Position of the smallest nonzero |entry| with row, col >= t.
    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(u64, usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let v = self.a[(i, j)].unsigned_abs();
                if v != 0 && best.is_none_or(|(b, _, _)| v < b) {
                    best = Some((v, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn smallest_in_column(&self, t: usize) -> Option<usize> {
        (t..self.a.rows)
            .filter(|&i| self.a[(i, t)] != 0)
            .min_by_key(|&i| self.a[(i, t)].unsigned_abs())
    }

    fn smallest_in_row(&self, t: usize) -> Option<usize> {
        (t..self.a.cols)
            .filter(|&j| self.a[(t, j)] != 0)
            .min_by_key(|&j| self.a[(t, j)].unsigned_abs())
    }

    fn reduce_pivot(&mut self, t: usize) -> Result<(), SnfError> {
        loop {
            let pivot = self.a[(t, t)];
            for i in t + 1..self.a.rows {
                let q = self.a[(i, t)] / pivot;
                if q != 0 {
                    self.add_row(i, t, q.checked_neg().ok_or(SnfError::Overflow)?)?;
                }
            }
            if (t + 1..self.a.rows).any(|i| self.a[(i, t)] != 0) {
                let i = self.smallest_in_column(t).expect("nonzero entry exists");
                self.swap_rows(t, i);
                continue;
            }

            let pivot = self.a[(t, t)];
            for j in t + 1..self.a.cols {
                let q = self.a[(t, j)] / pivot;
                if q != 0 {
                    self.add_col(j, t, q.checked_neg().ok_or(SnfError::Overflow)?)?;
                }
            }
            if (t + 1..self.a.cols).any(|j| self.a[(t, j)] != 0) {
                let j = self.smallest_in_row(t).expect("nonzero entry exists");
                self.swap_cols(t, j);
                continue;
            }

            let pivot = self.a[(t, t)];
            let offender = (t + 1..self.a.rows).find(|&i| {
                (t + 1..self.a.cols).any(|j| self.a[(i, j)] % pivot != 0)
            });
            match offender {
                Some(i) => self.add_row(t, i, 1)?,
                None => return Ok(()),
            }
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Result<SmithForm, SnfError> {
    let mut e = Elimination {
        a: a.clone(),
        u: IntMatrix::identity(a.rows),
        u_inv: IntMatrix::identity(a.rows),
        v: IntMatrix::identity(a.cols),
    };
    for t in 0..a.rows.min(a.cols) {
        let Some((i, j)) = e.smallest_in_block(t) else {
            break;
        };
        e.swap_rows(t, i);
        e.swap_cols(t, j);
        e.reduce_pivot(t)?;
        if e.a[(t, t)] < 0 {
            e.negate_row(t)?;
        }
    }
    Ok(SmithForm {
        u: e.u,
        s: e.a,
        v: e.v,
        u_inv: e.u_inv,
    })
}

/// Some integer solution of `a x = b`, or `None` when there is none.
pub fn solve_integer_system(a: &IntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>, SnfError> {
    if b.len() != a.rows {
        return Err(SnfError::Shape(format!(
            "{} rows but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let smith = smith_normal_form(a)?;
    let c = smith.u.mul_vec(b)?;
    let mut y = vec![0i64; a.cols];
    for (i, &ci) in c.iter().enumerate() {
        let d = if i < a.cols { smith.s[(i, i)] } else { 0 };
        if d == 0 {
            if ci != 0 {
                return Ok(None);
            }
        } else if ci % d != 0 {
            return Ok(None);
        } else {
            y[i] = ci / d;
        }
    }
    smith.v.mul_vec(&y).map(Some)
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Independent of [`smith_normal_form`]; used to cross-check ranks.
pub fn rational_rank(a: &IntMatrix) -> Result<usize, SnfError> {
    let mut m: Vec<Vec<i128>> = a
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = m[rank][col]
                    .checked_mul(m[i][j])
                    .and_then(|x| m[i][col].checked_mul(m[rank][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or(SnfError::Overflow)?;
                m[i][j] = v / prev;
            }
            m[i][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn check(a: &IntMatrix) -> SmithForm {
        let smith = smith_normal_form(a).unwrap();
        assert_eq!(smith.u.mul(a).unwrap().mul(&smith.v).unwrap(), smith.s);
        assert!(smith.s.is_diagonal());
        assert_eq!(smith.u.mul(&smith.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        let d = smith.s.diagonal();
        assert!(d.iter().all(|&x| x >= 0));
        for w in d.windows(2) {
            assert!(w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0), "{d:?}");
        }
        smith
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries is 2 and |det| = |16 - 24| = 8, so diag(2, 4)
        let s = check(&m(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), vec![2, 4]);
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(check(&IntMatrix::identity(3)).invariant_factors(), vec![1, 1, 1]);
        assert_eq!(check(&m(&[&[0]])).invariant_factors(), vec![0]);
    }

    #[test]
    fn rectangular() {
        // gcd of entries 2, gcd of 2x2 minors (-12, -24, -12) is 12
        let s = check(&m(&[&[4, 6, 8], &[10, 12, 14]]));
        assert_eq!(s.invariant_factors(), vec![2, 6]);
        let s = check(&m(&[&[3], &[5], &[7]]));
        assert_eq!(s.invariant_factors(), vec![1]);
        check(&IntMatrix::zeros(0, 3));
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2 + 7;
        let a = m(&[&[big, big - 1], &[big - 3, big]]);
        match smith_normal_form(&a) {
            Err(SnfError::Overflow) => {}
            Ok(s) => assert_eq!(s.u.mul(&a).and_then(|x| x.mul(&s.v)).ok(), Some(s.s)),
            Err(e) => panic!("{e}"),
        }
        assert_eq!(m(&[&[i64::MAX]]).mul(&m(&[&[2]])), Err(SnfError::Overflow));
    }

    #[test]
    fn solves_systems() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let x = solve_integer_system(&a, &[2, 2]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vec![2, 2]);
        assert_eq!(solve_integer_system(&a, &[1, 0]).unwrap(), None);
        // 2x = 1 has no integer solution
        assert_eq!(solve_integer_system(&m(&[&[2]]), &[1]).unwrap(), None);
        // overdetermined, consistent
        let a = m(&[&[1], &[2]]);
        assert_eq!(solve_integer_system(&a, &[3, 6]).unwrap(), Some(vec![3]));
        assert_eq!(solve_integer_system(&a, &[3, 7]).unwrap(), None);
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-20i64..20, r * c).prop_map(move |data| IntMatrix {
                rows: r,
                cols: c,
                data,
            })
        })
    }

    proptest! {
        #[test]
        fn smith_form_contract(a in arb_matrix()) {
            check(&a);
        }

        // Rank additivity for subgroups H of Z^r spanned by the columns:
        // rank(H) + free rank of Z^r / H = r.
        #[test]
        fn rank_additivity(a in arb_matrix()) {
            let smith = smith_normal_form(&a).unwrap();
            let rank_h = rational_rank(&a).unwrap();
            let cokernel_free_rank = a.rows() - smith.rank();
            prop_assert_eq!(rank_h + cokernel_free_rank, a.rows());
        }

        #[test]
        fn solver_agrees_with_bruteforce(a in arb_matrix(), seed in prop::collection::vec(-3i64..4, 4)) {
            let x0: Vec<i64> = seed.iter().copied().take(a.cols()).chain(std::iter::repeat(0)).take(a.cols()).collect();
            let b = a.mul_vec(&x0).unwrap();
            let x = solve_integer_system(&a, &b).unwrap().expect("b is in the image");
            prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
        }
    }
}

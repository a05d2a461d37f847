//! Dense exact matrices over a field: rank by fraction-free elimination, products, solves.

use std::fmt::Debug;

use num_traits::Num;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Num + Clone + Debug> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn map<U: Num + Clone + Debug>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Bareiss fraction-free elimination; returns the echelon form and its rank.
    fn bareiss(&self) -> (Self, usize) {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != rank {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, rank * m.cols + j);
                }
            }
            let pivot = m.get(rank, col).clone();
            for r in rank + 1..m.rows {
                let lead = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = (pivot.clone() * m.get(r, j).clone() - lead.clone() * m.get(rank, j).clone()) / prev.clone();
                    m.set(r, j, v);
                }
            }
            prev = pivot;
            rank += 1;
        }
        (m, rank)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let mut prev = T::one();
        let mut sign = T::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                return T::zero();
            };
            if p != col {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, col * m.cols + j);
                }
                sign = T::zero() - sign;
            }
            let pivot = m.get(col, col).clone();
            for r in col + 1..m.rows {
                let lead = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = (pivot.clone() * m.get(r, j).clone() - lead.clone() * m.get(col, j).clone()) / prev.clone();
                    m.set(r, j, v);
                }
            }
            prev = pivot;
        }
        sign * m.get(m.rows - 1, m.cols - 1).clone()
    }

    /// Solves `self · x = b` exactly; `None` when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            let Some(p) = (r..aug.rows).find(|&i| !aug.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..aug.cols {
                aug.data.swap(p * aug.cols + j, r * aug.cols + j);
            }
            let inv = T::one() / aug.get(r, col).clone();
            for j in 0..aug.cols {
                let v = aug.get(r, j).clone() * inv.clone();
                aug.set(r, j, v);
            }
            for i in 0..aug.rows {
                if i == r || aug.get(i, col).is_zero() {
                    continue;
                }
                let f = aug.get(i, col).clone();
                for j in 0..aug.cols {
                    let v = aug.get(i, j).clone() - f.clone() * aug.get(r, j).clone();
                    aug.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
            if r == aug.rows {
                break;
            }
        }
        if (r..aug.rows).any(|i| !aug.get(i, self.cols).is_zero()) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the right null space.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
            let inv = T::one() / m.get(r, col).clone();
            for j in 0..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); m.cols];
                v[f] = T::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = T::zero() - m.get(i, f).clone();
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(q(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(q(&[&[0, 1], &[1, 0]]).rank(), 2);
        assert_eq!(q(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(q(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn determinant_and_solve() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.determinant(), rational(18, 1));
        assert_eq!(q(&[&[0, 1], &[1, 0]]).determinant(), rational(-1, 1));
        let x = m.solve(&[rational(3, 1), rational(5, 1), rational(5, 1)]).unwrap();
        assert_eq!(x, vec![rational(1, 1), rational(1, 1), rational(1, 1)]);
        assert!(q(&[&[1, 1], &[1, 1]]).solve(&[rational(1, 1), rational(2, 1)]).is_none());
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            let col = Matrix::from_rows(v.into_iter().map(|x| vec![x]).collect());
            assert!(m.mul(&col).is_zero());
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in prop::collection::vec(-2i64..3, 12)) {
            let m = Matrix::from_rows(entries.chunks(4).map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect());
            prop_assert_eq!(m.rank() + m.kernel().len(), 4);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}

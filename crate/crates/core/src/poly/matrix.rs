use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Poly;

/// Dense matrix over `Q[x1..xm]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, data: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        Self::scalar(n, &Poly::one(nvars))
    }

    /// `a · Id_n`.
    pub fn scalar(n: usize, a: &Poly) -> Self {
        let mut m = Self::zero(n, n, a.nvars());
        for i in 0..n {
            m.set(i, i, a.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty(), "matrix must be nonempty");
        let r = rows.len();
        let c = rows[0].len();
        let nvars = rows[0][0].nvars();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for p in row {
                assert_eq!(p.nvars(), nvars);
                data.push(p);
            }
        }
        PolyMatrix { rows: r, cols: c, nvars, data }
    }

    pub fn column(v: Vec<Poly>) -> Self {
        Self::from_rows(v.into_iter().map(|p| vec![p]).collect())
    }

    pub fn row(v: Vec<Poly>) -> Self {
        Self::from_rows(vec![v])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert_eq!(p.nvars(), self.nvars);
        self.data[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows, self.nvars) && self.is_square()
    }

    /// The scalar `a` when `self = a·Id`.
    pub fn as_scalar(&self) -> Option<Poly> {
        if !self.is_square() {
            return None;
        }
        let a = self.get(0, 0).clone();
        (*self == Self::scalar(self.rows, &a)).then_some(a)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, a: &Poly) -> PolyMatrix {
        self.map(|p| a * p)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = Self::zero(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Poly {
        assert!(self.is_square());
        let mut t = Poly::zero(self.nvars);
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        t
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &PolyMatrix) -> PolyMatrix {
        &(self * other) - &(other * self)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc += &(a * vj);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn extend(&self, nvars: usize) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, nvars, data: self.data.iter().map(|p| p.extend(nvars)).collect() }
    }

    fn check_same_shape(&self, other: &PolyMatrix) {
        assert_eq!((self.rows, self.cols, self.nvars), (other.rows, other.cols, other.nvars), "matrix shape mismatch");
    }
}

impl Add<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.check_same_shape(rhs);
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.check_same_shape(rhs);
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|p| -p)
    }
}

impl Mul<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = PolyMatrix::zero(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn m(rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_poly(s, 2).unwrap()).collect()).collect())
    }

    #[test]
    fn units_and_products() {
        let a = m(&[&["x", "1"], &["0", "y"]]);
        let id = PolyMatrix::identity(2, 2);
        assert_eq!(&a * &id, a);
        assert!((&a * &PolyMatrix::zero(2, 2, 2)).is_zero());
        assert_eq!((&a * &a).to_string(), "[[x1^2, x1 + x2], [0, x2^2]]");
        assert_eq!(a.trace(), parse_poly("x + y", 2).unwrap());
    }

    #[test]
    fn non_square_and_scalars() {
        let u = m(&[&["1"], &["x"]]);
        let w = m(&[&["1 - x*y", "y"]]);
        assert!((&w * &u).is_identity());
        let phi = &u * &w;
        assert_eq!(&phi * &phi, phi);
        assert_eq!(PolyMatrix::scalar(2, &parse_poly("x", 2).unwrap()).as_scalar(), Some(parse_poly("x", 2).unwrap()));
        assert_eq!(phi.as_scalar(), None);
    }
}

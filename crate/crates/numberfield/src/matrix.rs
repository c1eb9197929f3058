use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::{FieldElement, FieldHandle, NumberField};
use crate::poly::{isolate_real_roots, Poly};
use crate::rational::{parse_rational, rat_to_string, Rational};
use crate::FieldError;

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Result of [`RatMatrix::eigen_kernel`].
#[derive(Clone, Debug)]
pub struct EigenVector {
    pub vector: Vec<FieldElement>,
    /// Dimension of the kernel of `M - mu I`; values above one are reported, not rejected.
    pub kernel_dim: usize,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, FieldError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|v| v.len() != c) {
            return Err(FieldError::Dimension("ragged rows".into()));
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer matrix from nested slices; panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
            .collect();
        RatMatrix::from_rows(v).expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64` when they are all small integers.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &RatMatrix) -> Result<RatMatrix, FieldError> {
        if self.cols != o.rows {
            return Err(FieldError::Dimension(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut m = RatMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j) + a * o.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn add(&self, o: &RatMatrix) -> Result<RatMatrix, FieldError> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(FieldError::Dimension("add".into()));
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, o: &RatMatrix) -> Result<RatMatrix, FieldError> {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Matrix times a vector of field elements.
    pub fn apply(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::Dimension(format!("{} columns, vector of {}", self.cols, v.len())));
        }
        let f = v.first().map(|x| x.field().clone()).ok_or_else(|| FieldError::Dimension("empty vector".into()))?;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(f.zero(), |acc, (a, x)| &acc + &x.scale(a))
            })
            .collect())
    }

    /// Characteristic polynomial `det(xI - M)` by the Faddeev-LeVerrier recursion.
    pub fn char_poly(&self) -> Result<Poly, FieldError> {
        if !self.is_square() {
            return Err(FieldError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut mk = RatMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&mk)?;
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            let t = self.mul(&next)?.trace();
            c[n - k] = -t / Rational::from_integer(BigInt::from(k as i64));
            mk = next;
        }
        Ok(Poly::new(c))
    }

    /// `p(M)`, by Horner's scheme.
    pub fn eval_poly(&self, p: &Poly) -> Result<RatMatrix, FieldError> {
        if !self.is_square() {
            return Err(FieldError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut acc = RatMatrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&RatMatrix::identity(n).scale(c))?;
        }
        Ok(acc)
    }

    /// Certified rational interval around the largest real eigenvalue of a
    /// non-negative matrix, of width below `eps`.
    pub fn perron_interval(&self, eps: &Rational) -> Result<(Rational, Rational), FieldError> {
        if !self.is_square() {
            return Err(FieldError::NotSquare(self.rows, self.cols));
        }
        if self.data.iter().any(|x| x.is_negative()) {
            return Err(FieldError::NegativeEntries);
        }
        let p = self.char_poly()?.squarefree_part();
        let (mut lo, mut hi) = isolate_real_roots(&p).pop().expect("a non-negative matrix has a real eigenvalue");
        let slo = p.eval(&lo).is_positive();
        let two = Rational::from_integer(BigInt::from(2));
        while &hi - &lo >= *eps {
            let m = (&lo + &hi) / &two;
            let v = p.eval(&m);
            if v.is_zero() {
                return Ok((m.clone(), m));
            }
            if v.is_positive() == slo {
                lo = m;
            } else {
                hi = m;
            }
        }
        Ok((lo, hi))
    }

    /// Rational within `eps` of the Perron root.
    pub fn perron_root(&self, eps: &Rational) -> Result<Rational, FieldError> {
        let (lo, hi) = self.perron_interval(eps)?;
        Ok((lo + hi) / Rational::from_integer(BigInt::from(2)))
    }

    /// A kernel vector of `M - mu I` over the field of `mu`, found by exact
    /// Gaussian elimination. With `normalize = Some(k)` the vector is scaled so
    /// that its first `k` coordinates sum to one.
    pub fn eigen_kernel(&self, mu: &FieldElement, normalize: Option<usize>) -> Result<EigenVector, FieldError> {
        if !self.is_square() {
            return Err(FieldError::NotSquare(self.rows, self.cols));
        }
        let f = mu.field().clone();
        let n = self.rows;
        let mut a: Vec<Vec<FieldElement>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let e = f.from_rational(self.get(i, j).clone());
                        if i == j {
                            &e - mu
                        } else {
                            e
                        }
                    })
                    .collect()
            })
            .collect();
        let pivots = rref(&mut a);
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        let Some(&fc) = free.first() else {
            return Err(FieldError::NotAnEigenvalue);
        };
        let mut v = vec![f.zero(); n];
        v[fc] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[r][fc];
        }
        if let Some(k) = normalize {
            let s = v.iter().take(k).fold(f.zero(), |acc, x| &acc + x);
            if !s.is_zero() {
                v = v.iter().map(|x| x / &s).collect();
            }
        }
        Ok(EigenVector { vector: v, kernel_dim: free.len() })
    }

    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        rref_rational(&mut a).len()
    }

    /// The unique `X` with `self * X = rhs`, or `None` when the system is
    /// inconsistent or underdetermined. `self` may have more rows than columns.
    pub fn solve_exact(&self, rhs: &RatMatrix) -> Option<RatMatrix> {
        if rhs.rows != self.rows {
            return None;
        }
        let n = self.cols;
        let mut aug: Vec<Vec<Rational>> =
            (0..self.rows).map(|i| self.row(i).iter().chain(rhs.row(i)).cloned().collect()).collect();
        let piv = rref_rational(&mut aug);
        if piv.iter().any(|&c| c >= n) || piv.len() < n {
            return None;
        }
        let rows = (0..n).map(|i| aug[i][n..].to_vec()).collect();
        RatMatrix::from_rows(rows).ok()
    }

    /// Whether `mu` is an eigenvalue: the kernel of `M - mu I` is nontrivial.
    pub fn has_eigenvalue(&self, mu: &FieldElement) -> bool {
        self.eigen_kernel(mu, None).is_ok()
    }
}

/// Reduced row echelon form in place; returns pivot columns by row.
fn rref(a: &mut [Vec<FieldElement>]) -> Vec<usize> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inverse().expect("nonzero pivot");
        for j in 0..m {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let k = a[i][c].clone();
                for j in 0..m {
                    let t = &a[r][j] * &k;
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rref_rational(a: &mut [Vec<Rational>]) -> Vec<usize> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..m {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let k = a[i][c].clone();
                for j in 0..m {
                    let t = &a[r][j] * &k;
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves the square system `A x = b` over the field of `b` (used by callers
/// that need an exact linear solve); `None` if `A` is singular.
pub fn solve(a: &RatMatrix, b: &[FieldElement], f: &Arc<NumberField>) -> Option<Vec<FieldElement>> {
    let n = a.rows();
    let mut aug: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            let mut row: Vec<FieldElement> = a.row(i).iter().map(|x| f.from_rational(x.clone())).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(rat_to_string).collect()).collect();
        let w = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for (i, r) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, s) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$}", s, w = w)?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(rat_to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn n1() -> RatMatrix {
        RatMatrix::from_i64(&[[3, 1, -1, -4], [-1, 2, 0, 0], [-2, -2, 1, 4], [3, 2, -1, -5]])
    }

    #[test]
    fn char_poly_of_zero_matrix() {
        let z = RatMatrix::zeros(3, 3);
        assert_eq!(z.char_poly().unwrap(), Poly::from_ints(&[0, 0, 0, 1]));
    }

    #[test]
    fn char_poly_n1() {
        assert_eq!(n1().char_poly().unwrap(), Poly::from_ints(&[-1, 5, -4, -1, 1]));
    }

    #[test]
    fn cayley_hamilton_n1() {
        let m = n1();
        assert!(m.eval_poly(&m.char_poly().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn perron_of_identity() {
        let r = RatMatrix::identity(3).perron_root(&rat(1, 1000)).unwrap();
        assert!((crate::rat_to_f64(&r) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn perron_rejects_negative() {
        assert_eq!(n1().perron_root(&rat(1, 10)).unwrap_err(), FieldError::NegativeEntries);
        assert_eq!(RatMatrix::zeros(2, 3).char_poly().unwrap_err(), FieldError::NotSquare(2, 3));
    }

    #[test]
    fn identity_kernel() {
        let f = NumberField::new(&Poly::from_ints(&[-2, 0, 1]), rat(1, 1), rat(2, 1)).unwrap();
        let e = RatMatrix::identity(3).eigen_kernel(&f.one(), None).unwrap();
        assert_eq!(e.kernel_dim, 3);
        let r = RatMatrix::identity(3).apply(&e.vector).unwrap();
        assert_eq!(r, e.vector);
        assert_eq!(RatMatrix::identity(3).eigen_kernel(&f.gen(), None).unwrap_err(), FieldError::NotAnEigenvalue);
    }

    #[test]
    fn json_shape() {
        let m = RatMatrix::from_rows(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(-3, 1), rat(2, 3)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","0"],["-3","2/3"]]"#);
        assert_eq!(serde_json::from_str::<RatMatrix>(&s).unwrap(), m);
    }

    #[test]
    fn overdetermined_solve() {
        // x + y = 3, x - y = 1, 2x = 4
        let a = RatMatrix::from_i64(&[[1, 1], [1, -1], [2, 0]]);
        let b = RatMatrix::from_i64(&[[3], [1], [4]]);
        let x = a.solve_exact(&b).unwrap();
        assert_eq!(x, RatMatrix::from_i64(&[[2], [1]]));
        assert_eq!(a.rank(), 2);
        let bad = RatMatrix::from_i64(&[[3], [1], [5]]);
        assert!(a.solve_exact(&bad).is_none());
        let under = RatMatrix::from_i64(&[[1, 1]]);
        assert!(under.solve_exact(&RatMatrix::from_i64(&[[1]])).is_none());
    }
}

//! Dense exact linear algebra over the Gaussian rationals. Dimensions at play
//! are tiny (at most 2n for the double, 2^n for the form space), so everything
//! is straightforward Gaussian elimination with exact division.

use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;

use crate::scalars::poly::Poly;
use crate::scalars::scalar::Scalar;

pub type Vector = Vec<Scalar>;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: &[Vector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(Scalar::is_real)
    }

    pub fn conj(&self) -> Matrix {
        self.map(Scalar::conj)
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map(|v| v * c)
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square());
        let mut t = Scalar::zero();
        for i in 0..self.rows {
            t += self.at(i, i);
        }
        t
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Scalar::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = Scalar::zero();
            for j in 0..self.cols {
                let e = self.at(i, j);
                if !e.is_zero() && !v[j].is_zero() {
                    let t = e * &v[j];
                    acc += &t;
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn pow(&self, e: usize) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Horner evaluation of a polynomial at this matrix.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = &acc * self;
            for i in 0..n {
                let d = acc.at(i, i) + c;
                acc.set(i, i, d);
            }
        }
        acc
    }

    /// Polynomial in this matrix applied to a vector, without forming powers.
    pub fn eval_poly_vec(&self, p: &Poly, v: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::zero(); v.len()];
        let mut power = v.to_vec();
        for (k, c) in p.coeffs().iter().enumerate() {
            if k > 0 {
                power = self.apply(&power);
            }
            if !c.is_zero() {
                for (o, pv) in out.iter_mut().zip(&power) {
                    let t = c * pv;
                    *o += &t;
                }
            }
        }
        out
    }

    /// Row-reduce in place to reduced row echelon form; returns pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let a = self.at(r, j).clone();
                    let b = self.at(p, j).clone();
                    self.set(r, j, b);
                    self.set(p, j, a);
                }
            }
            let inv = self.at(r, c).inv().unwrap();
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j) - &(&f * self.at(r, j));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of the null space. The returned vectors are linearly independent,
    /// annihilated by the matrix, and span the whole kernel; rank + nullity =
    /// cols is asserted in debug builds.
    pub fn kernel(&self) -> Vec<Vector> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, free);
            }
            basis.push(v);
        }
        debug_assert_eq!(rank + basis.len(), self.cols);
        debug_assert!(basis.iter().all(|v| self.apply(v).iter().all(Scalar::is_zero)));
        basis
    }

    /// A particular solution of `self * x = b`, if the system is consistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(self.rows, b.len());
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let pivots = aug.rref_in_place();
        // pivots must sit in the left block, one per column
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| k != c) {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                det = -det;
                for j in 0..n {
                    let a = m.at(c, j).clone();
                    let b = m.at(p, j).clone();
                    m.set(c, j, b);
                    m.set(p, j, a);
                }
            }
            let pivot = m.at(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for i in c + 1..n {
                if !m.at(i, c).is_zero() {
                    let f = m.at(i, c) * &inv;
                    for j in c..n {
                        let v = m.at(i, j) - &(&f * m.at(c, j));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    /// Characteristic polynomial by the Faddeev-LeVerrier recurrence (exact:
    /// only divisions by integers occur).
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut mk = self.clone();
        for k in 1..=n {
            let c = -(&mk.trace() / &Scalar::from_int(k as i64));
            coeffs[n - k] = c.clone();
            if k < n {
                let mut shifted = mk.clone();
                for i in 0..n {
                    let d = shifted.at(i, i) + &c;
                    shifted.set(i, i, d);
                }
                mk = self * &shifted;
            }
        }
        Poly::new(coeffs)
    }

    fn vectorize(&self) -> Vector {
        self.entries.clone()
    }

    /// Monic minimal polynomial, found as the first linear dependence among
    /// the vectorized powers I, M, M^2, ...
    pub fn min_poly(&self) -> Poly {
        assert!(self.is_square());
        let mut powers: Vec<Vector> = vec![Matrix::identity(self.rows).vectorize()];
        let mut current = Matrix::identity(self.rows);
        loop {
            current = &current * self;
            let target = current.vectorize();
            let span = Matrix::from_columns(&powers);
            if let Some(c) = span.solve(&target) {
                // M^k = sum c_j M^j  =>  x^k - sum c_j x^j
                let mut coeffs = c.iter().map(|v| -v).collect::<Vec<_>>();
                coeffs.push(Scalar::one());
                let p = Poly::new(coeffs);
                debug_assert!(self.eval_poly(&p).is_zero());
                return p;
            }
            powers.push(target);
            assert!(
                powers.len() <= self.rows * self.rows + 1,
                "power sequence must become dependent"
            );
        }
    }
}

impl std::ops::Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|v| -v)
    }
}

impl std::ops::Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    let cur = out.at(i, j) + &t;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// --- free vector helpers -------------------------------------------------

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Scalar], c: &Scalar) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_is_zero(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_zero)
}

pub fn vec_conj(a: &[Scalar]) -> Vector {
    a.iter().map(Scalar::conj).collect()
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

/// Does `target` lie in the span of `basis`?
pub fn in_span(basis: &[Vector], target: &[Scalar]) -> bool {
    if vec_is_zero(target) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    Matrix::from_columns(basis).solve(target).is_some()
}

/// Extend `inside` over `sub`: returns members of `inside` whose addition to
/// `sub` raises the rank step by step, so that `sub ++ result` spans
/// `span(sub) + span(inside)`.
pub fn complement_within(sub: &[Vector], inside: &[Vector]) -> Vec<Vector> {
    let mut acc: Vec<Vector> = sub.to_vec();
    let mut rank = span_rank(&acc);
    let mut out = Vec::new();
    for v in inside {
        acc.push(v.clone());
        let r = span_rank(&acc);
        if r > rank {
            rank = r;
            out.push(v.clone());
        } else {
            acc.pop();
        }
    }
    out
}

/// Signature (n_plus, n_minus) of a real symmetric matrix, computed by exact
/// symmetric congruence diagonalization (no square roots are needed to count
/// signs).
pub fn signature(gram: &Matrix) -> (usize, usize) {
    assert!(gram.is_square());
    assert!(gram.is_real(), "signature of a non-real Gram matrix");
    debug_assert_eq!(gram, &gram.transpose());
    let n = gram.rows();
    let mut g = gram.clone();
    let mut processed = vec![false; n];
    let (mut pos, mut neg) = (0usize, 0usize);
    for _ in 0..n {
        // Pick an unprocessed index with nonzero diagonal, fixing up with the
        // u+v trick when the remaining diagonal is all zero.
        let live: Vec<usize> = (0..n).filter(|&i| !processed[i]).collect();
        if live.is_empty() {
            break;
        }
        let diag_idx = live.iter().copied().find(|&i| !g.at(i, i).is_zero());
        let i = match diag_idx {
            Some(i) => i,
            None => {
                let mut pair = None;
                'search: for &a in &live {
                    for &b in &live {
                        if a < b && !g.at(a, b).is_zero() {
                            pair = Some((a, b));
                            break 'search;
                        }
                    }
                }
                let Some((a, b)) = pair else { break };
                // row/col a += row/col b makes the (a,a) entry 2 g[a][b] != 0
                for j in 0..n {
                    let v = g.at(a, j) + g.at(b, j);
                    g.set(a, j, v);
                }
                for j in 0..n {
                    let v = g.at(j, a) + g.at(j, b);
                    g.set(j, a, v);
                }
                a
            }
        };
        let d = g.at(i, i).clone();
        let sign: BigRational = d.re().clone();
        if sign.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let d_inv = d.inv().unwrap();
        // clear row/col i against the rest
        for j in 0..n {
            if j == i || processed[j] {
                continue;
            }
            if g.at(j, i).is_zero() {
                continue;
            }
            let f = g.at(j, i) * &d_inv;
            for k in 0..n {
                let v = g.at(j, k) - &(&f * g.at(i, k));
                g.set(j, k, v);
            }
            for k in 0..n {
                let v = g.at(k, j) - &(&f * g.at(k, i));
                g.set(k, j, v);
            }
        }
        processed[i] = true;
    }
    (pos, neg)
}

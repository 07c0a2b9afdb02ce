//! The Drinfeld double of a Lie algebra: g + g* with the tautological split
//! pairing, the Dorfman bracket on invariant sections, the associated
//! trilinear tensor, classical lifts f + (-f^T), and the pairing-preserving
//! conjugation group used for fuzzing.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalars::matrix::{vec_add, vec_conj, vec_is_zero, vec_scale, vec_sub};
use crate::scalars::{Matrix, Poly, Scalar, Vector};

/// A finite-dimensional Lie algebra given by structure constants
/// `[v_i, v_j] = sum_k c_{ij}^k v_k`, stored for `i < j` (0-based).
/// Construction checks the Jacobi identity exactly on all basis triples.
#[derive(Clone, Debug)]
pub struct LiePresentation {
    name: String,
    dim: usize,
    structure: BTreeMap<(usize, usize), Vector>,
}

impl LiePresentation {
    /// `entries` are 1-based `(i, j, k, coefficient)` with `i < j`.
    pub fn new(name: &str, dim: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut structure: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for (i, j, k, c) in entries {
            if *i == 0 || *j == 0 || *k == 0 || *i > dim || *j > dim || *k > dim {
                return Err(Error::Invalid(format!(
                    "bracket entry ({i},{j},{k}) out of range for dim {dim}"
                )));
            }
            if i >= j {
                return Err(Error::Invalid(format!(
                    "bracket entry ({i},{j},{k}) must have i < j"
                )));
            }
            let row = structure
                .entry((i - 1, j - 1))
                .or_insert_with(|| vec![Scalar::zero(); dim]);
            row[k - 1] += c;
        }
        let alg = LiePresentation {
            name: name.to_string(),
            dim,
            structure,
        };
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn abelian(name: &str, dim: usize) -> Self {
        LiePresentation {
            name: name.to_string(),
            dim,
            structure: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients of `[v_i, v_j]` in the basis, 0-based indices.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        if i == j {
            return vec![Scalar::zero(); self.dim];
        }
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        match self.structure.get(&(a, b)) {
            Some(v) if sign == 1 => v.clone(),
            Some(v) => v.iter().map(|c| -c).collect(),
            None => vec![Scalar::zero(); self.dim],
        }
    }

    /// `[x, y]` for coefficient vectors in the algebra.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let b = self.bracket_basis(i, j);
                let c = xi * yj;
                for (o, bk) in out.iter_mut().zip(&b) {
                    if !bk.is_zero() {
                        let t = &c * bk;
                        *o += &t;
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    let ei = basis_coeffs(self.dim, i);
                    let ej = basis_coeffs(self.dim, j);
                    let ek = basis_coeffs(self.dim, k);
                    let mut total = self.bracket(&self.bracket(&ei, &ej), &ek);
                    total = vec_add(&total, &self.bracket(&self.bracket(&ej, &ek), &ei));
                    total = vec_add(&total, &self.bracket(&self.bracket(&ek, &ei), &ej));
                    if !vec_is_zero(&total) {
                        return Err(Error::Jacobi(i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        Ok(())
    }
}

fn basis_coeffs(dim: usize, i: usize) -> Vector {
    let mut v = vec![Scalar::zero(); dim];
    v[i] = Scalar::one();
    v
}

/// An element of the double g + g*, held as coordinates in the fixed frame
/// `v_1..v_n, a_1..a_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct GenVector {
    pub vec: Vector,
    pub cov: Vector,
}

impl GenVector {
    pub fn zero(n: usize) -> Self {
        GenVector {
            vec: vec![Scalar::zero(); n],
            cov: vec![Scalar::zero(); n],
        }
    }

    /// Frame element `v_{i+1}` (0-based index).
    pub fn basis_vec(n: usize, i: usize) -> Self {
        let mut g = GenVector::zero(n);
        g.vec[i] = Scalar::one();
        g
    }

    /// Frame element `a_{i+1}` (0-based index).
    pub fn basis_cov(n: usize, i: usize) -> Self {
        let mut g = GenVector::zero(n);
        g.cov[i] = Scalar::one();
        g
    }

    /// Frame element by flat index: `0..n` are vectors, `n..2n` covectors.
    pub fn frame(n: usize, a: usize) -> Self {
        if a < n {
            GenVector::basis_vec(n, a)
        } else {
            GenVector::basis_cov(n, a - n)
        }
    }

    pub fn from_coords(coords: &[Scalar]) -> Self {
        let n = coords.len() / 2;
        assert_eq!(coords.len(), 2 * n);
        GenVector {
            vec: coords[..n].to_vec(),
            cov: coords[n..].to_vec(),
        }
    }

    pub fn coords(&self) -> Vector {
        let mut c = self.vec.clone();
        c.extend(self.cov.iter().cloned());
        c
    }

    pub fn n(&self) -> usize {
        self.vec.len()
    }

    pub fn is_zero(&self) -> bool {
        vec_is_zero(&self.vec) && vec_is_zero(&self.cov)
    }

    pub fn scale(&self, c: &Scalar) -> GenVector {
        GenVector {
            vec: vec_scale(&self.vec, c),
            cov: vec_scale(&self.cov, c),
        }
    }

    pub fn add(&self, rhs: &GenVector) -> GenVector {
        GenVector {
            vec: vec_add(&self.vec, &rhs.vec),
            cov: vec_add(&self.cov, &rhs.cov),
        }
    }

    pub fn sub(&self, rhs: &GenVector) -> GenVector {
        GenVector {
            vec: vec_sub(&self.vec, &rhs.vec),
            cov: vec_sub(&self.cov, &rhs.cov),
        }
    }

    pub fn neg(&self) -> GenVector {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn conj(&self) -> GenVector {
        GenVector {
            vec: vec_conj(&self.vec),
            cov: vec_conj(&self.cov),
        }
    }
}

impl std::fmt::Display for GenVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let mut push = |c: &Scalar, sym: String| {
            if c.is_zero() {
                return;
            }
            let cs = if c.is_one() {
                String::new()
            } else if *c == Scalar::from_int(-1) {
                "-".into()
            } else if c.is_real() || c.re().is_zero() {
                c.to_string()
            } else {
                format!("({c})")
            };
            parts.push(format!("{cs}{sym}"));
        };
        for (i, c) in self.vec.iter().enumerate() {
            push(c, format!("v{}", i + 1));
        }
        for (i, c) in self.cov.iter().enumerate() {
            push(c, format!("a{}", i + 1));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl std::fmt::Debug for GenVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Tautological pairing `<x, y> = (xi(Y) + eta(X)) / 2` for `x = X + xi`,
/// `y = Y + eta`. Symmetric, split, invariant.
pub fn pairing(x: &GenVector, y: &GenVector) -> Scalar {
    assert_eq!(x.n(), y.n(), "pairing dimension mismatch");
    let mut acc = Scalar::zero();
    for i in 0..x.n() {
        let t = &x.vec[i] * &y.cov[i];
        acc += &t;
        let t = &x.cov[i] * &y.vec[i];
        acc += &t;
    }
    &acc * &Scalar::rational(1, 2)
}

/// Dorfman bracket of invariant sections:
/// `[[X + xi, Y + eta]] = [X, Y] + (Z -> -eta([X, Z]) + xi([Y, Z]))`.
pub fn dorfman(alg: &LiePresentation, x: &GenVector, y: &GenVector) -> GenVector {
    let n = alg.dim();
    assert_eq!(x.n(), n, "dorfman dimension mismatch");
    assert_eq!(y.n(), n, "dorfman dimension mismatch");
    let vec = alg.bracket(&x.vec, &y.vec);
    let mut cov = vec![Scalar::zero(); n];
    for (k, slot) in cov.iter_mut().enumerate() {
        let bx = alg.bracket(&x.vec, &basis_coeffs(n, k));
        let by = alg.bracket(&y.vec, &basis_coeffs(n, k));
        let mut acc = Scalar::zero();
        for i in 0..n {
            if !y.cov[i].is_zero() && !bx[i].is_zero() {
                let t = &y.cov[i] * &bx[i];
                acc -= &t;
            }
            if !x.cov[i].is_zero() && !by[i].is_zero() {
                let t = &x.cov[i] * &by[i];
                acc += &t;
            }
        }
        *slot = acc;
    }
    GenVector { vec, cov }
}

/// The trilinear form `T(x, y, z) = <[[x, y]], z>`; totally antisymmetric on
/// invariant sections.
pub fn courant_t(alg: &LiePresentation, x: &GenVector, y: &GenVector, z: &GenVector) -> Scalar {
    pairing(&dorfman(alg, x, y), z)
}

/// A linear endomorphism of the double in the frame `v_1..v_n, a_1..a_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Endo {
    pub mat: Matrix,
}

impl Endo {
    pub fn new(mat: Matrix) -> Self {
        assert!(mat.is_square());
        assert_eq!(mat.rows() % 2, 0);
        Endo { mat }
    }

    pub fn zero(n: usize) -> Self {
        Endo::new(Matrix::zeros(2 * n, 2 * n))
    }

    pub fn n(&self) -> usize {
        self.mat.rows() / 2
    }

    pub fn apply(&self, x: &GenVector) -> GenVector {
        GenVector::from_coords(&self.mat.apply(&x.coords()))
    }

    pub fn is_real(&self) -> bool {
        self.mat.is_real()
    }

    /// Skew-symmetry for the tautological pairing, checked on all frame pairs.
    pub fn check_skew(&self) -> Result<()> {
        let n = self.n();
        for a in 0..2 * n {
            for b in a..2 * n {
                let ea = GenVector::frame(n, a);
                let eb = GenVector::frame(n, b);
                let s = pairing(&self.apply(&ea), &eb) + pairing(&ea, &self.apply(&eb));
                if !s.is_zero() {
                    return Err(Error::NotSkew(a + 1, b + 1));
                }
            }
        }
        Ok(())
    }

    pub fn min_poly(&self) -> Poly {
        self.mat.min_poly()
    }
}

/// The lift `f + (-f^T)` of a classical endomorphism of g to the double.
/// Always skew-symmetric for the tautological pairing.
pub fn classical_lift(f: &Matrix) -> Endo {
    assert!(f.is_square());
    let n = f.rows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, f.at(i, j).clone());
            m.set(n + i, n + j, -f.at(j, i));
        }
    }
    Endo::new(m)
}

/// Minimal polynomial of `classical_lift(f)` predicted from the minimal
/// polynomial `p` of `f`. The dual block satisfies the monic reflection
/// `pt(x) = (-1)^(deg p) p(-x)`, so the lift's minimal polynomial is the
/// least common multiple `p * pt / gcd(p, pt)`. When the common factor is
/// even this reduces to `(-1)^(deg p - deg q) p(x) p(-x) / q(x)` with `q`
/// the largest monic even divisor of `p`.
pub fn classical_lift_min_poly(p: &Poly) -> Poly {
    let deg_p = p.degree().expect("nonzero minimal polynomial");
    let mut pt = p.reflect();
    if deg_p % 2 == 1 {
        pt = -&pt;
    }
    let g = p.gcd(&pt);
    let num = p * &pt;
    let (out, rem) = num.divrem(&g).expect("gcd divides");
    debug_assert!(rem.is_zero());
    debug_assert!(out.is_monic());
    out
}

/// Generators of the pairing-preserving transformations used for fuzzing:
/// shear by a 2-form, shear by a bivector, and a basis change of g carried to
/// g* by the inverse transpose.
#[derive(Clone, Debug)]
pub enum PairingMap {
    /// `X + xi -> X + xi + i_X B` for a skew matrix `B`.
    BTransform(Matrix),
    /// `X + xi -> X + beta(xi) + xi` for a skew matrix `beta`.
    BetaTransform(Matrix),
    /// `X + xi -> A X + (A^T)^{-1} xi` for invertible `A`.
    FrameChange(Matrix),
}

impl PairingMap {
    pub fn matrix(&self, n: usize) -> Result<Matrix> {
        let mut g = Matrix::identity(2 * n);
        match self {
            PairingMap::BTransform(b) => {
                assert_eq!(b.rows(), n);
                check_antisymmetric(b)?;
                // covector part picks up (i_X B)_k = sum_j X_j B_{jk}
                for k in 0..n {
                    for j in 0..n {
                        g.set(n + k, j, b.at(j, k).clone());
                    }
                }
            }
            PairingMap::BetaTransform(beta) => {
                assert_eq!(beta.rows(), n);
                check_antisymmetric(beta)?;
                for k in 0..n {
                    for j in 0..n {
                        g.set(k, n + j, beta.at(j, k).clone());
                    }
                }
            }
            PairingMap::FrameChange(a) => {
                assert_eq!(a.rows(), n);
                let inv_t = a
                    .inverse()
                    .ok_or(Error::NonInvertibleFrameChange)?
                    .transpose();
                for i in 0..n {
                    for j in 0..n {
                        g.set(i, j, a.at(i, j).clone());
                        g.set(n + i, n + j, inv_t.at(i, j).clone());
                    }
                }
            }
        }
        Ok(g)
    }
}

fn check_antisymmetric(m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !(m.at(i, j) + m.at(j, i)).is_zero() {
                return Err(Error::Invalid("shear block must be antisymmetric".into()));
            }
        }
    }
    Ok(())
}

/// Conjugate `phi` by a word in the generator families. The result is again
/// skew-symmetric and shares the minimal polynomial and block type multiset.
pub fn onn_conjugate(phi: &Endo, word: &[PairingMap]) -> Result<Endo> {
    let n = phi.n();
    let mut g = Matrix::identity(2 * n);
    for w in word {
        g = &w.matrix(n)? * &g;
    }
    let g_inv = g.inverse().expect("products of invertible maps");
    Ok(Endo::new(&(&g * &phi.mat) * &g_inv))
}

/// Input document for the command line and fixture files. Unknown fields are
/// rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub name: String,
    pub dim: usize,
    /// `[i, j, k, coefficient]`, 1-based, `i < j`: coefficient of `v_k` in `[v_i, v_j]`.
    pub bracket: Vec<(usize, usize, usize, String)>,
    /// `2n` rows of `2n` scalar strings, row-major, frame order `v_1..v_n, a_1..a_n`.
    pub phi: Vec<Vec<String>>,
}

impl InputDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("input document: {e}")))
    }

    /// Validate and build the algebra and the endomorphism.
    /// Checks Jacobi and skew-symmetry.
    pub fn build(&self) -> Result<(LiePresentation, Endo)> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Invalid("dim must be positive".into()));
        }
        let mut entries = Vec::new();
        for (i, j, k, c) in &self.bracket {
            entries.push((*i, *j, *k, Scalar::parse(c)?));
        }
        let alg = LiePresentation::new(&self.name, n, &entries)?;
        if self.phi.len() != 2 * n || self.phi.iter().any(|row| row.len() != 2 * n) {
            return Err(Error::Dimension(format!(
                "phi must be a {0}x{0} matrix of scalar strings",
                2 * n
            )));
        }
        let mut mat = Matrix::zeros(2 * n, 2 * n);
        for (i, row) in self.phi.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                mat.set(i, j, Scalar::parse(cell)?);
            }
        }
        let endo = Endo::new(mat);
        endo.check_skew()?;
        Ok((alg, endo))
    }
}

/// The 3-dimensional Heisenberg algebra `[v1, v2] = v3`.
pub fn heisenberg() -> LiePresentation {
    LiePresentation::new("heisenberg", 3, &[(1, 2, 3, Scalar::one())]).unwrap()
}

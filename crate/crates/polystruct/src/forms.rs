//! Operator calculus on the 2^n-dimensional space of invariant forms: the
//! Clifford action of the double, the Chevalley-Eilenberg differential, lifts
//! of skew endomorphisms, the minimal operator, eigenvalue components of the
//! differential, canonical bundles of isotropic subspaces and their gradings.
//!
//! Wedge monomials `a_S` are indexed by subset bitmasks of `{1..n}`; signs
//! come from the sorted normal form.

use std::collections::BTreeSet;

use crate::double::{pairing, Endo, GenVector, LiePresentation};
use crate::error::{Error, Result};
use crate::scalars::matrix::span_rank;
use crate::scalars::{Matrix, Poly, Scalar, Vector};
use crate::spectral::SpectralData;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
    Ungraded,
}

#[derive(Clone, Debug)]
pub struct FormSpace {
    n: usize,
}

impl FormSpace {
    pub fn new(n: usize) -> Self {
        FormSpace { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Form degree of a basis monomial.
    pub fn degree(&self, mask: usize) -> u32 {
        (mask as u64).count_ones()
    }

    /// `a_{i+1} /\ a_S` in normal form: `None` if `i` already occurs,
    /// otherwise the sign and the enlarged mask.
    pub fn wedge_gen(&self, i: usize, mask: usize) -> Option<(i64, usize)> {
        let bit = 1usize << i;
        if mask & bit != 0 {
            return None;
        }
        let below = (mask & (bit - 1)).count_ones();
        let sign = if below % 2 == 0 { 1 } else { -1 };
        Some((sign, mask | bit))
    }

    /// Contraction `i_{v_{i+1}} a_S`.
    pub fn contract_gen(&self, i: usize, mask: usize) -> Option<(i64, usize)> {
        let bit = 1usize << i;
        if mask & bit == 0 {
            return None;
        }
        let below = (mask & (bit - 1)).count_ones();
        let sign = if below % 2 == 0 { 1 } else { -1 };
        Some((sign, mask & !bit))
    }
}

/// Apply the Clifford action of `x` to a coefficient vector over the wedge
/// basis, without materializing the operator matrix.
pub fn clifford_apply(space: &FormSpace, x: &GenVector, form: &[Scalar]) -> Vector {
    let mut out = vec![Scalar::zero(); space.dim()];
    for (mask, c) in form.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for i in 0..space.n() {
            if !x.vec[i].is_zero() {
                if let Some((sign, m2)) = space.contract_gen(i, mask) {
                    let t = &(&x.vec[i] * c) * &Scalar::from_int(sign);
                    out[m2] += &t;
                }
            }
            if !x.cov[i].is_zero() {
                if let Some((sign, m2)) = space.wedge_gen(i, mask) {
                    let t = &(&x.cov[i] * c) * &Scalar::from_int(sign);
                    out[m2] += &t;
                }
            }
        }
    }
    out
}

/// An operator on the invariant form space, with its parity for the graded
/// commutator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormOperator {
    pub mat: Matrix,
    pub parity: Parity,
}

impl FormOperator {
    pub fn new(mat: Matrix, parity: Parity) -> Self {
        let op = FormOperator { mat, parity };
        debug_assert!(op.parity_consistent());
        op
    }

    pub fn zero(space: &FormSpace, parity: Parity) -> Self {
        FormOperator {
            mat: Matrix::zeros(space.dim(), space.dim()),
            parity,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    fn parity_consistent(&self) -> bool {
        let d = self.dim();
        let n = d.trailing_zeros();
        let _ = n;
        let want = match self.parity {
            Parity::Even => 0u32,
            Parity::Odd => 1,
            Parity::Ungraded => return true,
        };
        for i in 0..d {
            for j in 0..d {
                if !self.mat.at(i, j).is_zero() {
                    let di = (i as u64).count_ones();
                    let dj = (j as u64).count_ones();
                    if (di + dj) % 2 != want % 2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn apply(&self, form: &[Scalar]) -> Vector {
        self.mat.apply(form)
    }

    pub fn add(&self, rhs: &FormOperator) -> FormOperator {
        let parity = if self.is_zero() {
            rhs.parity
        } else if rhs.is_zero() || self.parity == rhs.parity {
            self.parity
        } else {
            Parity::Ungraded
        };
        FormOperator {
            mat: &self.mat + &rhs.mat,
            parity,
        }
    }

    pub fn sub(&self, rhs: &FormOperator) -> FormOperator {
        self.add(&rhs.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> FormOperator {
        FormOperator {
            mat: self.mat.scale(c),
            parity: self.parity,
        }
    }

    pub fn compose(&self, rhs: &FormOperator) -> FormOperator {
        let parity = match (self.parity, rhs.parity) {
            (Parity::Even, p) | (p, Parity::Even) => p,
            (Parity::Odd, Parity::Odd) => Parity::Even,
            _ => Parity::Ungraded,
        };
        FormOperator {
            mat: &self.mat * &rhs.mat,
            parity,
        }
    }

    /// Graded commutator `[A, B] = AB - (-1)^{|A||B|} BA`.
    pub fn commutator(&self, rhs: &FormOperator) -> FormOperator {
        let eps: i64 = match (self.parity, rhs.parity) {
            (Parity::Odd, Parity::Odd) => -1,
            (Parity::Ungraded, _) | (_, Parity::Ungraded) => {
                panic!("graded commutator of ungraded operators")
            }
            _ => 1,
        };
        let ab = &self.mat * &rhs.mat;
        let ba = &rhs.mat * &self.mat;
        let parity = match (self.parity, rhs.parity) {
            (Parity::Odd, Parity::Odd) | (Parity::Even, Parity::Even) => Parity::Even,
            _ => Parity::Odd,
        };
        FormOperator {
            mat: &ab - &ba.scale(&Scalar::from_int(eps)),
            parity,
        }
    }
}

/// Matrix of the Clifford action `X + xi -> i_X + xi /\ .`; squares to
/// `<x, x> I`.
pub fn clifford(space: &FormSpace, x: &GenVector) -> FormOperator {
    let d = space.dim();
    let mut mat = Matrix::zeros(d, d);
    for col in 0..d {
        let mut form = vec![Scalar::zero(); d];
        form[col] = Scalar::one();
        let image = clifford_apply(space, x, &form);
        for (row, v) in image.into_iter().enumerate() {
            if !v.is_zero() {
                mat.set(row, col, v);
            }
        }
    }
    FormOperator::new(mat, Parity::Odd)
}

/// The invariant Chevalley-Eilenberg differential: on generators
/// `d a_k = -sum_{i<j} c_{ij}^k a_i /\ a_j`, extended as an odd derivation.
/// Squares to zero exactly when the Jacobi identity holds.
pub fn ce_differential(space: &FormSpace, alg: &LiePresentation) -> FormOperator {
    let n = space.n();
    assert_eq!(n, alg.dim());
    let d = space.dim();
    // d a_k as coefficient vectors
    let mut d_gen: Vec<Vector> = Vec::with_capacity(n);
    for k in 0..n {
        let mut out = vec![Scalar::zero(); d];
        for i in 0..n {
            for j in i + 1..n {
                let c = alg.bracket_basis(i, j)[k].clone();
                if c.is_zero() {
                    continue;
                }
                let mask = (1usize << i) | (1usize << j);
                out[mask] -= &c;
            }
        }
        d_gen.push(out);
    }
    let mut mat = Matrix::zeros(d, d);
    for col in 0..d {
        // d(a_T) = sum_p (-1)^p (d a_{t_p}) /\ a_{T \ t_p}
        let mut image = vec![Scalar::zero(); d];
        let mut p = 0i64;
        for t in 0..n {
            if col & (1 << t) == 0 {
                continue;
            }
            let rest = col & !(1 << t);
            let sign = Scalar::from_int(if p % 2 == 0 { 1 } else { -1 });
            for (mask2, c) in d_gen[t].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // wedge a_{mask2} /\ a_rest, generator by generator from the top
                if mask2 & rest != 0 {
                    continue;
                }
                let mut sgn = 1i64;
                let mut acc = rest;
                for g in (0..n).rev() {
                    if mask2 & (1 << g) != 0 {
                        let (s2, m2) = space.wedge_gen(g, acc).unwrap();
                        sgn *= s2;
                        acc = m2;
                    }
                }
                let t2 = &(&sign * c) * &Scalar::from_int(sgn);
                image[acc] += &t2;
            }
            p += 1;
        }
        for (row, v) in image.into_iter().enumerate() {
            if !v.is_zero() {
                mat.set(row, col, v);
            }
        }
    }
    let op = FormOperator::new(mat, Parity::Odd);
    debug_assert!(op.compose(&op).is_zero(), "d^2 = 0");
    op
}

fn lift_with_order(space: &FormSpace, phi: &Endo, lowest_first: bool) -> FormOperator {
    let n = space.n();
    let d = space.dim();
    // eps in degree two: i_{v_i} eps = -(covector part of phi v_i)
    let mut eps = vec![Scalar::zero(); d];
    for i in 0..n {
        let img = phi.apply(&GenVector::basis_vec(n, i));
        for j in i + 1..n {
            // eps(v_i, v_j) = -img.cov[j]
            let mask = (1usize << i) | (1usize << j);
            eps[mask] = -&img.cov[j];
        }
    }
    let phi_gen: Vec<GenVector> = (0..n)
        .map(|i| phi.apply(&GenVector::basis_cov(n, i)))
        .collect();
    let mut cols: Vec<Vector> = vec![vec![]; d];
    cols[0] = eps;
    for mask in 1..d {
        let s = if lowest_first {
            mask.trailing_zeros() as usize
        } else {
            (usize::BITS - 1 - mask.leading_zeros()) as usize
        };
        let rest = mask & !(1 << s);
        // sign of a_s /\ a_rest
        let (sgn, check) = space.wedge_gen(s, rest).unwrap();
        debug_assert_eq!(check, mask);
        // lift(a_s /\ rest) = a_s /\ lift(rest) + phi(a_s) (rest)
        let mut col = vec![Scalar::zero(); d];
        for (m2, c) in cols[rest].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some((s2, m3)) = space.wedge_gen(s, m2) {
                let t = c * &Scalar::from_int(s2);
                col[m3] += &t;
            }
        }
        let mut rest_form = vec![Scalar::zero(); d];
        rest_form[rest] = Scalar::one();
        let acted = clifford_apply(space, &phi_gen[s], &rest_form);
        for (m3, v) in acted.into_iter().enumerate() {
            if !v.is_zero() {
                col[m3] += &v;
            }
        }
        if sgn == -1 {
            for v in col.iter_mut() {
                *v = -&*v;
            }
        }
        cols[mask] = col;
    }
    let mut mat = Matrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                mat.set(i, j, v.clone());
            }
        }
    }
    FormOperator::new(mat, Parity::Even)
}

/// The unique even operator with `[lift, f] = 0` for scalars,
/// `[lift, x] = phi(x)` for all generalized vectors, and `lift(1)` of form
/// degree two. Requires `phi` skew; verified on the whole frame.
pub fn lift(space: &FormSpace, phi: &Endo) -> Result<FormOperator> {
    phi.check_skew()?;
    let out = lift_with_order(space, phi, true);
    debug_assert!(verify_lift_conditions(space, phi, &out));
    Ok(out)
}

/// Same operator built by peeling generators from the other end; used as the
/// uniqueness cross-check.
pub fn lift_alternative(space: &FormSpace, phi: &Endo) -> Result<FormOperator> {
    phi.check_skew()?;
    Ok(lift_with_order(space, phi, false))
}

/// The defining conditions of the lift, checked entry-exactly.
pub fn verify_lift_conditions(space: &FormSpace, phi: &Endo, lifted: &FormOperator) -> bool {
    let n = space.n();
    // degree-two value on constants
    let one_img = lifted.mat.column(0);
    for (mask, c) in one_img.iter().enumerate() {
        if !c.is_zero() && space.degree(mask) != 2 {
            return false;
        }
    }
    // commutation with every frame Clifford generator
    for a in 0..2 * n {
        let x = GenVector::frame(n, a);
        let cx = clifford(space, &x);
        let want = clifford(space, &phi.apply(&x));
        if lifted.commutator(&cx) != want {
            return false;
        }
    }
    lifted.parity == Parity::Even
}

/// Recognize an odd operator as `clifford(x)`: the covector part is read off
/// the action on constants, the vector part off the action on degree one, and
/// the candidate is then verified against the whole matrix.
pub fn as_generalized_vector(space: &FormSpace, op: &FormOperator) -> Result<GenVector> {
    let n = space.n();
    let one_img = op.mat.column(0);
    let mut cand = GenVector::zero(n);
    for (mask, c) in one_img.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if space.degree(mask) != 1 {
            return Err(Error::NotAVector);
        }
        cand.cov[mask.trailing_zeros() as usize] = c.clone();
    }
    for i in 0..n {
        // coefficient of the constant monomial in op(a_i)
        cand.vec[i] = op.mat.at(0, 1 << i).clone();
    }
    if clifford(space, &cand).mat == op.mat {
        Ok(cand)
    } else {
        Err(Error::NotAVector)
    }
}

/// Iterated adjoint images `ad_lift^j (d)` for `j = 0..=max`.
pub fn ad_powers(lifted: &FormOperator, d: &FormOperator, max: usize) -> Vec<FormOperator> {
    let mut out = vec![d.clone()];
    for _ in 0..max {
        let next = lifted.commutator(out.last().unwrap());
        out.push(next);
    }
    out
}

/// `P(ad_lift)(d)`: the minimal operator of `phi` when `P` is its minimal
/// polynomial.
pub fn minimal_operator(space: &FormSpace, lifted: &FormOperator, d: &FormOperator, p: &Poly) -> FormOperator {
    let deg = p.degree().expect("nonzero polynomial");
    let ads = ad_powers(lifted, d, deg);
    let mut acc = FormOperator::zero(space, Parity::Odd);
    for (j, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&ads[j].scale(c));
        }
    }
    acc
}

/// The derived bracket `[[x, y]]_delta = [[x, delta], y]` of generalized
/// vectors with respect to an odd operator.
pub fn derived_bracket(
    space: &FormSpace,
    delta: &FormOperator,
    x: &GenVector,
    y: &GenVector,
) -> FormOperator {
    let cx = clifford(space, x);
    let cy = clifford(space, y);
    cx.commutator(delta).commutator(&cy)
}

/// Eigenvalue components of the differential: for each eigenvalue `lambda`
/// of `phi`, `d_lambda = sum_i a_{lambda,i} Q_{lambda,i}(ad_lift)(d)`.
/// The components always sum to `d`.
pub fn d_lambda_decomposition(
    space: &FormSpace,
    lifted: &FormOperator,
    d: &FormOperator,
    spec: &SpectralData,
) -> Vec<(Scalar, FormOperator)> {
    let deg = spec.minpoly.degree().expect("nonzero minimal polynomial");
    let ads = ad_powers(lifted, d, deg.saturating_sub(1));
    let mut out = Vec::new();
    for (lambda, _) in &spec.spectrum {
        let r = spec.projector_poly(lambda);
        let mut acc = FormOperator::zero(space, Parity::Odd);
        for (j, c) in r.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&ads[j].scale(c));
            }
        }
        out.push((lambda.clone(), acc));
    }
    debug_assert!({
        let mut total = FormOperator::zero(space, Parity::Odd);
        for (_, op) in &out {
            total = total.add(op);
        }
        total.mat == d.mat
    });
    out
}

/// For each eigenvalue, whether `(ad_lift - lambda)^{m(lambda)} (d_lambda)`
/// is the Clifford action of a generalized vector. All hold exactly when the
/// structure is minimal.
pub fn d_lambda_vector_criterion(
    space: &FormSpace,
    lifted: &FormOperator,
    components: &[(Scalar, FormOperator)],
    spec: &SpectralData,
) -> Vec<(Scalar, bool)> {
    components
        .iter()
        .map(|(lambda, dl)| {
            let m = spec.multiplicity(lambda);
            let mut cur = dl.clone();
            for _ in 0..m {
                let shifted = lifted.commutator(&cur).sub(&cur.scale(lambda));
                cur = shifted;
            }
            (lambda.clone(), as_generalized_vector(space, &cur).is_ok())
        })
        .collect()
}

/// Basis of forms annihilated by the Clifford action of every element of an
/// isotropic list; rank is `2^(n - rank L)`.
pub fn canonical_bundle(space: &FormSpace, l: &[GenVector]) -> Result<Vec<Vector>> {
    for x in l {
        for y in l {
            if !pairing(x, y).is_zero() {
                return Err(Error::NotIsotropic);
            }
        }
    }
    let d = space.dim();
    let mut stacked_rows: Vec<Vector> = Vec::new();
    for x in l {
        let op = clifford(space, x);
        for i in 0..d {
            stacked_rows.push(op.mat.row(i));
        }
    }
    if stacked_rows.is_empty() {
        return Ok((0..d)
            .map(|i| {
                let mut v = vec![Scalar::zero(); d];
                v[i] = Scalar::one();
                v
            })
            .collect());
    }
    let kernel = Matrix::from_rows(stacked_rows).kernel();
    let r = span_rank(&l.iter().map(GenVector::coords).collect::<Vec<_>>());
    debug_assert_eq!(kernel.len(), 1 << (space.n() - r));
    Ok(kernel)
}

fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    if r > k {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + k - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Projector family of the grading induced by a decomposition `L + L'` of a
/// quasi-split subspace into isotropic halves: grade `r` is spanned by
/// `(r-fold products of clifford(L')) K_L`. Projectors sum to the identity
/// and multiply to zero pairwise; `clifford(L)` lowers the grade by one and
/// `clifford(L')` raises it.
pub fn grading_projectors(
    space: &FormSpace,
    l: &[GenVector],
    l_prime: &[GenVector],
) -> Result<Vec<FormOperator>> {
    let k = l.len();
    if l_prime.len() != k || k == 0 {
        return Err(Error::Degenerate);
    }
    let mut all: Vec<GenVector> = l.to_vec();
    all.extend(l_prime.iter().cloned());
    let gram = Matrix::from_fn(2 * k, 2 * k, |i, j| pairing(&all[i], &all[j]));
    if gram.det().is_zero() {
        return Err(Error::Degenerate);
    }
    let kl = canonical_bundle(space, l)?;
    let d = space.dim();
    let mut columns: Vec<Vector> = Vec::with_capacity(d);
    let mut grade_ranges: Vec<(usize, usize)> = Vec::new();
    for r in 0..=k {
        let start = columns.len();
        for combo in combinations(k, r) {
            for base in &kl {
                let mut form = base.clone();
                for &i in combo.iter().rev() {
                    form = clifford_apply(space, &l_prime[i], &form);
                }
                columns.push(form);
            }
        }
        grade_ranges.push((start, columns.len()));
    }
    if columns.len() != d {
        return Err(Error::Degenerate);
    }
    let basis = Matrix::from_columns(&columns);
    let inv = basis.inverse().ok_or(Error::Degenerate)?;
    let mut out = Vec::new();
    for (start, end) in grade_ranges {
        let mut selector = Matrix::zeros(d, d);
        for i in start..end {
            selector.set(i, i, Scalar::one());
        }
        let proj = &(&basis * &selector) * &inv;
        out.push(FormOperator {
            mat: proj,
            parity: Parity::Ungraded,
        });
    }
    debug_assert!({
        let mut total = Matrix::zeros(d, d);
        for p in &out {
            total = &total + &p.mat;
        }
        total == Matrix::identity(d)
    });
    Ok(out)
}

/// The set of grades an operator moves: `s` is present when some component
/// `P_{a} op P_{b}` with `a - b = s` is nonzero.
pub fn operator_degrees(op: &FormOperator, projectors: &[FormOperator]) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for (a, pa) in projectors.iter().enumerate() {
        for (b, pb) in projectors.iter().enumerate() {
            let comp = &(&pa.mat * &op.mat) * &pb.mat;
            if !comp.is_zero() {
                out.insert(a as i64 - b as i64);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::{dorfman, heisenberg};
    use crate::scalars::matrix::vec_is_zero;

    fn s(t: &str) -> Scalar {
        Scalar::parse(t).unwrap()
    }

    fn unit(space: &FormSpace, mask: usize) -> Vector {
        let mut v = vec![Scalar::zero(); space.dim()];
        v[mask] = Scalar::one();
        v
    }

    #[test]
    fn form_space_counts() {
        let space = FormSpace::new(3);
        assert_eq!(space.dim(), 8);
        let mut per_degree = [0usize; 4];
        for mask in 0..8 {
            per_degree[space.degree(mask) as usize] += 1;
        }
        assert_eq!(per_degree, [1, 3, 3, 1]);
    }

    #[test]
    fn clifford_acts_as_wedge_and_contraction() {
        let space = FormSpace::new(3);
        let a1 = GenVector::basis_cov(3, 0);
        let op = clifford(&space, &a1);
        assert_eq!(op.apply(&unit(&space, 0)), unit(&space, 1));
        let v1 = GenVector::basis_vec(3, 0);
        let op = clifford(&space, &v1);
        // i_{v1} (a1 /\ a2) = a2
        assert_eq!(op.apply(&unit(&space, 0b011)), unit(&space, 0b010));
    }

    #[test]
    fn clifford_squares_to_pairing() {
        for n in [1usize, 3] {
            let space = FormSpace::new(n);
            let x = GenVector::basis_vec(n, 0).add(&GenVector::basis_cov(n, 0));
            let op = clifford(&space, &x);
            assert_eq!(op.compose(&op).mat, Matrix::identity(space.dim()));
        }
    }

    #[test]
    fn clifford_relation_on_frames() {
        let space = FormSpace::new(3);
        for a in 0..6 {
            for b in 0..6 {
                let x = GenVector::frame(3, a);
                let y = GenVector::frame(3, b);
                let cx = clifford(&space, &x);
                let cy = clifford(&space, &y);
                let anti = cx.compose(&cy).add(&cy.compose(&cx));
                let expected = Matrix::identity(space.dim())
                    .scale(&(&pairing(&x, &y) * &Scalar::from_int(2)));
                assert_eq!(anti.mat, expected);
            }
        }
    }

    #[test]
    fn ce_differential_on_heisenberg() {
        let h = heisenberg();
        let space = FormSpace::new(3);
        let d = ce_differential(&space, &h);
        // d a3 = -a1 /\ a2
        let img = d.apply(&unit(&space, 0b100));
        let mut expected = vec![Scalar::zero(); 8];
        expected[0b011] = s("-1");
        assert_eq!(img, expected);
        assert!(d.compose(&d).is_zero());
        // abelian algebra: d = 0
        let ab = LiePresentation::abelian("abelian", 3);
        assert!(ce_differential(&space, &ab).is_zero());
    }

    #[test]
    fn derived_bracket_reproduces_dorfman() {
        let h = heisenberg();
        let space = FormSpace::new(3);
        let d = ce_differential(&space, &h);
        for a in 0..6 {
            for b in 0..6 {
                let x = GenVector::frame(3, a);
                let y = GenVector::frame(3, b);
                let via_ops = derived_bracket(&space, &d, &x, &y);
                let got = as_generalized_vector(&space, &via_ops).unwrap();
                assert_eq!(got, dorfman(&h, &x, &y), "frame pair ({a}, {b})");
            }
        }
    }

    #[test]
    fn ce_differential_is_not_a_vector() {
        let h = heisenberg();
        let space = FormSpace::new(3);
        let d = ce_differential(&space, &h);
        assert!(matches!(
            as_generalized_vector(&space, &d),
            Err(Error::NotAVector)
        ));
        // but honest Clifford operators round-trip, including zero
        let x = GenVector::basis_vec(3, 0).add(&GenVector::basis_cov(3, 1));
        let back = as_generalized_vector(&space, &clifford(&space, &x)).unwrap();
        assert_eq!(back, x);
        let zero = FormOperator::zero(&space, Parity::Odd);
        assert_eq!(as_generalized_vector(&space, &zero).unwrap(), GenVector::zero(3));
    }

    #[test]
    fn lift_of_classical_and_b_field() {
        let space = FormSpace::new(2);
        // f = rotation; phi = f + (-f^T) has lift acting on degree one as -f^T
        let mut f = Matrix::zeros(2, 2);
        f.set(0, 1, s("-1"));
        f.set(1, 0, s("1"));
        let phi = crate::double::classical_lift(&f);
        let lifted = lift(&space, &phi).unwrap();
        assert!(vec_is_zero(&lifted.mat.column(0)), "lift(1) = 0 for classical lifts");
        // on degree one the lift acts as -f^T
        for i in 0..2 {
            let img = lifted.mat.column(1 << i);
            for j in 0..2 {
                assert_eq!(img[1 << j], -f.at(i, j), "lift on a_{}", i + 1);
            }
        }
        assert!(verify_lift_conditions(&space, &phi, &lifted));

        // pure B-field: phi X = i_X B, phi a = 0, lift(1) = -B as a two-form
        let mut m = Matrix::zeros(4, 4);
        // B = e1 /\ e2 with B(v1, v2) = 1: (i_{v1} B) = a2, (i_{v2} B) = -a1
        m.set(3, 0, s("1"));
        m.set(2, 1, s("-1"));
        let phi_b = Endo::new(m);
        phi_b.check_skew().unwrap();
        let lifted_b = lift(&space, &phi_b).unwrap();
        let one_img = lifted_b.mat.column(0);
        let mut expected = vec![Scalar::zero(); 4];
        expected[0b11] = s("-1");
        assert_eq!(one_img, expected);
        assert!(verify_lift_conditions(&space, &phi_b, &lifted_b));

        // zero lifts to zero
        let z = Endo::zero(2);
        assert!(lift(&space, &z).unwrap().is_zero());
    }

    #[test]
    fn lift_uniqueness_via_second_construction() {
        let h = heisenberg();
        let _ = h;
        let space = FormSpace::new(3);
        // a generic skew phi: classical part + B + beta
        let mut m = Matrix::zeros(6, 6);
        m.set(1, 0, s("1"));
        m.set(2, 1, s("1"));
        m.set(5, 1, s("1"));
        m.set(4, 2, s("-1"));
        m.set(3, 4, s("-1"));
        m.set(4, 5, s("-1"));
        let phi = Endo::new(m);
        phi.check_skew().unwrap();
        let a = lift(&space, &phi).unwrap();
        let b = lift_alternative(&space, &phi).unwrap();
        assert_eq!(a.mat, b.mat);
    }

    #[test]
    fn canonical_bundle_ranks() {
        let space = FormSpace::new(3);
        // all of g kills exactly the constants
        let g_basis: Vec<GenVector> = (0..3).map(|i| GenVector::basis_vec(3, i)).collect();
        let kb = canonical_bundle(&space, &g_basis).unwrap();
        assert_eq!(kb.len(), 1);
        assert!(!kb[0][0].is_zero());
        // all of g* kills exactly the top form
        let gs_basis: Vec<GenVector> = (0..3).map(|i| GenVector::basis_cov(3, i)).collect();
        let kb = canonical_bundle(&space, &gs_basis).unwrap();
        assert_eq!(kb.len(), 1);
        assert!(!kb[0][0b111].is_zero());
        // a rank-one isotropic line: v1 + a2
        let l = vec![GenVector::basis_vec(3, 0).add(&GenVector::basis_cov(3, 1))];
        assert_eq!(canonical_bundle(&space, &l).unwrap().len(), 4);
        // non-isotropic input is rejected
        let bad = vec![GenVector::basis_vec(3, 0).add(&GenVector::basis_cov(3, 0))];
        assert!(matches!(canonical_bundle(&space, &bad), Err(Error::NotIsotropic)));
    }

    #[test]
    fn minimal_operator_of_a_complex_structure() {
        // For a square-root-of-minus-one structure the minimal operator is
        // [lift, [lift, d]] + d; and its eigenvalue components are
        // d_(i) = (d - i [lift, d]) / 2 and the conjugate.
        let alg = LiePresentation::new(
            "nilpotent4",
            4,
            &[
                (1, 2, 3, s("1")),
                (2, 4, 1, s("-1")),
            ],
        )
        .unwrap();
        let space = FormSpace::new(4);
        let d = ce_differential(&space, &alg);
        let mut j = Matrix::zeros(4, 4);
        j.set(0, 1, s("-1"));
        j.set(1, 0, s("1"));
        j.set(2, 3, s("-1"));
        j.set(3, 2, s("1"));
        let phi = crate::double::classical_lift(&j);
        let p = phi.min_poly();
        assert_eq!(p, crate::scalars::Poly::new(vec![s("1"), s("0"), s("1")]));
        let lifted = lift(&space, &phi).unwrap();
        let delta = minimal_operator(&space, &lifted, &d, &p);
        let expected = lifted.commutator(&lifted.commutator(&d)).add(&d);
        assert_eq!(delta.mat, expected.mat);

        let spec = crate::spectral::analyze(&phi).unwrap();
        let comps = d_lambda_decomposition(&space, &lifted, &d, &spec);
        let ad_d = lifted.commutator(&d);
        for (lambda, op) in &comps {
            // (d - lambda [lift, d]) / 2 for lambda = +-i
            let expected = d.sub(&ad_d.scale(lambda)).scale(&s("1/2"));
            assert_eq!(op.mat, expected.mat, "component at {lambda}");
        }

        // abelian algebra: d = 0, so the minimal operator and all components vanish
        let ab = LiePresentation::abelian("abelian", 4);
        let d0 = ce_differential(&space, &ab);
        assert!(minimal_operator(&space, &lifted, &d0, &p).is_zero());
        for (_, op) in d_lambda_decomposition(&space, &lifted, &d0, &spec) {
            assert!(op.is_zero());
        }
    }

    #[test]
    fn grading_by_form_degree() {
        // L = g*, L' = g gives the usual form degree... with K_L the top form
        // and clifford(g) raising toward lower degree; grade r slices have
        // binomial ranks and sum to 2^n.
        let space = FormSpace::new(3);
        let l: Vec<GenVector> = (0..3).map(|i| GenVector::basis_cov(3, i)).collect();
        let lp: Vec<GenVector> = (0..3).map(|i| GenVector::basis_vec(3, i)).collect();
        let projs = grading_projectors(&space, &l, &lp).unwrap();
        assert_eq!(projs.len(), 4);
        let mut total_rank = 0;
        for p in &projs {
            assert_eq!(&p.mat * &p.mat, p.mat, "idempotent");
            total_rank += p.mat.rank();
        }
        assert_eq!(total_rank, 8);
        for (i, a) in projs.iter().enumerate() {
            for (j, b) in projs.iter().enumerate() {
                if i != j {
                    assert!((&a.mat * &b.mat).is_zero());
                }
            }
        }
        // clifford(l in L) lowers the grade, clifford(l' in L') raises it
        let cl = clifford(&space, &l[0]);
        let degs = operator_degrees(&cl, &projs);
        assert!(degs.iter().all(|&d| d == -1), "{degs:?}");
        let cr = clifford(&space, &lp[0]);
        let degs = operator_degrees(&cr, &projs);
        assert!(degs.iter().all(|&d| d == 1), "{degs:?}");
        // degenerate pairs rejected
        let bad = grading_projectors(&space, &l[..1].to_vec(), &l[..1].to_vec());
        assert!(matches!(bad, Err(Error::Degenerate)));
    }
}

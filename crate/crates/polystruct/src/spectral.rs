//! Spectral analysis of a pairing-skew endomorphism of the double:
//! generalized eigenspaces, exact projectors from partial fractions, the
//! Jordan-Chevalley split, the block decomposition into indecomposable
//! pieces with Jordan-chain bases, and the eigenvalue-level compatibility
//! verdicts (closure of eigenspace brackets, non-resonance).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::double::{dorfman, pairing, Endo, GenVector, LiePresentation};
use crate::error::{Error, Result};
use crate::scalars::matrix::signature;
use crate::scalars::{partial_fractions, spectrum_extract, Matrix, Poly, Scalar, Vector};

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub minpoly: Poly,
    pub charpoly: Poly,
    /// Eigenvalues with their multiplicities in the minimal polynomial.
    pub spectrum: Vec<(Scalar, usize)>,
    /// One of each pair {lambda, -lambda}: positive real part, or positive
    /// imaginary part on the imaginary axis.
    pub sigma_plus: Vec<Scalar>,
    pub eigenbasis: BTreeMap<Scalar, Vec<GenVector>>,
    pub projectors: BTreeMap<Scalar, Matrix>,
    /// Partial fraction coefficients a_{lambda,i}, i = 1..m(lambda).
    pub partial_fraction: BTreeMap<Scalar, Vec<Scalar>>,
    pub semisimple: Endo,
    pub nilpotent: Endo,
}

impl SpectralData {
    pub fn multiplicity(&self, lambda: &Scalar) -> usize {
        self.spectrum
            .iter()
            .find(|(l, _)| l == lambda)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    pub fn rank(&self, lambda: &Scalar) -> usize {
        self.eigenbasis.get(lambda).map_or(0, Vec::len)
    }

    pub fn eigenvalues(&self) -> Vec<Scalar> {
        self.spectrum.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn contains(&self, lambda: &Scalar) -> bool {
        self.spectrum.iter().any(|(l, _)| l == lambda)
    }

    /// The polynomial `sum_i a_{lambda,i} Q_{lambda,i}` whose value at the
    /// endomorphism is the projector onto the lambda eigenspace.
    pub fn projector_poly(&self, lambda: &Scalar) -> Poly {
        let a = &self.partial_fraction[lambda];
        let mut acc = Poly::zero();
        for (idx, coeff) in a.iter().enumerate() {
            let i = idx + 1;
            let (q, r) = self
                .minpoly
                .divrem(&Poly::linear(lambda).pow(i))
                .expect("eigenvalue divides the minimal polynomial");
            debug_assert!(r.is_zero());
            acc = &acc + &q.scale(coeff);
        }
        acc
    }

    /// Exact membership of a vector in `L_mu + L_nu`, via the projectors onto
    /// all other eigenspaces.
    pub fn in_eigenspace_sum(&self, v: &GenVector, mu: &Scalar, nu: &Scalar) -> bool {
        self.component_outside(v, &[mu.clone(), nu.clone()]).is_zero()
    }

    /// The part of `v` outside the span of the named eigenspaces.
    pub fn component_outside(&self, v: &GenVector, keep: &[Scalar]) -> GenVector {
        let mut out = GenVector::zero(v.n());
        for (lambda, p) in &self.projectors {
            if keep.contains(lambda) {
                continue;
            }
            out = out.add(&GenVector::from_coords(&p.apply(&v.coords())));
        }
        out
    }
}

/// Full spectral analysis. Fails on non-skew input and on spectra leaving
/// the Gaussian rationals; the algebraic invariants of the output (projector
/// algebra, Jordan-Chevalley identities, eigenspace isotropy and rank
/// bookkeeping) are guaranteed by construction and asserted here.
pub fn analyze(phi: &Endo) -> Result<SpectralData> {
    phi.check_skew()?;
    let n2 = phi.mat.rows();
    let minpoly = phi.mat.min_poly();
    let spectrum = spectrum_extract(&minpoly)?;
    let pf = partial_fractions(&minpoly, &spectrum)?;
    let mut partial_fraction = BTreeMap::new();
    for (lambda, a) in pf {
        partial_fraction.insert(lambda, a);
    }

    let mut data = SpectralData {
        minpoly: minpoly.clone(),
        charpoly: phi.mat.char_poly(),
        spectrum: spectrum.clone(),
        sigma_plus: Vec::new(),
        eigenbasis: BTreeMap::new(),
        projectors: BTreeMap::new(),
        partial_fraction,
        semisimple: Endo::zero(n2 / 2),
        nilpotent: Endo::zero(n2 / 2),
    };
    data.sigma_plus = spectrum
        .iter()
        .map(|(l, _)| l.clone())
        .filter(|l| l.re().is_positive() || (l.re().is_zero() && l.im().is_positive()))
        .collect();

    let mut semisimple = Matrix::zeros(n2, n2);
    for (lambda, m) in &spectrum {
        let power = Poly::linear(lambda).pow(*m);
        let mat = phi.mat.eval_poly(&power);
        let basis: Vec<GenVector> = mat
            .kernel()
            .into_iter()
            .map(|v| GenVector::from_coords(&v))
            .collect();
        let proj = phi.mat.eval_poly(&data.projector_poly(lambda));
        semisimple = &semisimple + &proj.scale(lambda);
        data.eigenbasis.insert(lambda.clone(), basis);
        data.projectors.insert(lambda.clone(), proj);
    }
    data.semisimple = Endo::new(semisimple);
    data.nilpotent = Endo::new(&phi.mat - &data.semisimple.mat);

    verify_core_invariants(phi, &data);
    Ok(data)
}

/// Construction-level invariants; violations are engine bugs, not bad input.
fn verify_core_invariants(phi: &Endo, data: &SpectralData) {
    let n2 = phi.mat.rows();
    let mut sum = Matrix::zeros(n2, n2);
    for (lambda, p) in &data.projectors {
        assert_eq!(&(p * p), p, "projector at {lambda} is idempotent");
        assert_eq!(&(p * &phi.mat), &(&phi.mat * p), "projector commutes");
        for (mu, q) in &data.projectors {
            if mu != lambda {
                assert!((p * q).is_zero(), "projectors at {lambda}, {mu} are orthogonal");
            }
        }
        sum = &sum + p;
    }
    assert_eq!(sum, Matrix::identity(n2), "projectors resolve the identity");

    let s = &data.semisimple.mat;
    let nl = &data.nilpotent.mat;
    assert_eq!(&(s + nl), &phi.mat);
    assert_eq!(&(s * nl), &(nl * s), "semisimple and nilpotent parts commute");
    let max_m = data.spectrum.iter().map(|(_, m)| *m).max().unwrap_or(1);
    assert!(nl.pow(max_m).is_zero(), "nilpotent part has the right degree");
    for (lambda, p) in &data.projectors {
        assert_eq!(&(s * p), &p.scale(lambda), "semisimple part is scalar on each eigenspace");
    }

    // eigenspace ranks match the characteristic polynomial, symmetrically
    let mut char_rest = data.charpoly.clone();
    for (lambda, _) in &data.spectrum {
        let mut alg_mult = 0;
        loop {
            let (q, r) = char_rest.divrem(&Poly::linear(lambda)).unwrap();
            if r.is_zero() {
                char_rest = q;
                alg_mult += 1;
            } else {
                break;
            }
        }
        assert_eq!(
            data.rank(lambda),
            alg_mult,
            "rank of the {lambda} eigenspace equals its algebraic multiplicity"
        );
        assert_eq!(data.rank(lambda), data.rank(&-lambda), "rank symmetry");
    }
    assert_eq!(char_rest.degree(), Some(0), "characteristic polynomial splits");

    // isotropy and orthogonality of the eigenspaces
    for (lambda, basis) in &data.eigenbasis {
        for (mu, other) in &data.eigenbasis {
            let expect_zero = !(&(lambda + mu)).is_zero();
            if !expect_zero {
                continue;
            }
            for x in basis {
                for y in other {
                    assert!(
                        pairing(x, y).is_zero(),
                        "eigenspaces at {lambda}, {mu} must be pairing-orthogonal"
                    );
                }
            }
        }
    }
    // the pairing is nondegenerate on L_0 and on each L_lambda + L_{-lambda}
    for lambda in data
        .sigma_plus
        .iter()
        .chain(std::iter::once(&Scalar::zero()))
    {
        if !data.contains(lambda) {
            continue;
        }
        let mut vs: Vec<GenVector> = data.eigenbasis[lambda].clone();
        if !lambda.is_zero() {
            vs.extend(data.eigenbasis[&-lambda].iter().cloned());
        }
        let gram = Matrix::from_fn(vs.len(), vs.len(), |i, j| pairing(&vs[i], &vs[j]));
        assert!(!gram.det().is_zero(), "pairing nondegenerate on the {lambda} component");
    }
}

// ---------------------------------------------------------------------------
// Block decomposition
// ---------------------------------------------------------------------------

/// Indecomposable block types of a skew endomorphism on a split-pairing
/// space. `eps` is the real sign invariant; it is `None` when the input has
/// non-real entries, in which case no real form exists to read it from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockType {
    /// Odd-degree block on the kernel component, degree `2h + 1`.
    OddZero { h: usize, eps: Option<i8> },
    /// Paired block with real eigenvalues `{lambda, -lambda}` (or a skew pair
    /// on the kernel component when `lambda = 0` and the degree is even).
    RealPair { k: usize, lambda: Scalar },
    /// Paired block with imaginary eigenvalues `{i l0, -i l0}`; the sign is
    /// normalized to `+` for even degrees by eigenvalue ordering.
    ImaginaryPair { k: usize, lambda0: Scalar, eps: Option<i8> },
    /// Eigenvalue quadruple off both axes. Unreachable while spectra are
    /// restricted to rational and imaginary-rational eigenvalues; kept so the
    /// type system covers the classification.
    Quartet { k: usize, lambda: Scalar },
}

impl BlockType {
    pub fn degree(&self) -> usize {
        match self {
            BlockType::OddZero { h, .. } => 2 * h + 1,
            BlockType::RealPair { k, .. }
            | BlockType::ImaginaryPair { k, .. }
            | BlockType::Quartet { k, .. } => *k,
        }
    }

    fn eigenvalue_key(&self) -> Scalar {
        match self {
            BlockType::OddZero { .. } => Scalar::zero(),
            BlockType::RealPair { lambda, .. } => lambda.clone(),
            BlockType::ImaginaryPair { lambda0, .. } => {
                &Scalar::i() * lambda0
            }
            BlockType::Quartet { lambda, .. } => lambda.clone(),
        }
    }

    /// Expected signature of the tautological pairing on the real form.
    pub fn expected_signature(&self) -> Option<(usize, usize)> {
        match self {
            BlockType::OddZero { h, eps } => {
                let eps = (*eps)?;
                let plus = (eps == 1) == (h % 2 == 0);
                Some(if plus { (h + 1, *h) } else { (*h, h + 1) })
            }
            BlockType::RealPair { k, .. } => Some((*k, *k)),
            BlockType::ImaginaryPair { k, eps, .. } => {
                if k % 2 == 0 {
                    Some((*k, *k))
                } else {
                    let h = (k - 1) / 2;
                    let eps = (*eps)?;
                    let plus = (eps == 1) == (h % 2 == 0);
                    Some(if plus { (2 * h + 2, 2 * h) } else { (2 * h, 2 * h + 2) })
                }
            }
            BlockType::Quartet { k, .. } => Some((2 * k, 2 * k)),
        }
    }
}

fn fmt_eps(eps: Option<i8>) -> &'static str {
    match eps {
        Some(1) => "+",
        Some(-1) => "-",
        _ => "?",
    }
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockType::OddZero { h, eps } => write!(f, "D{}{}(0)", 2 * h + 1, fmt_eps(*eps)),
            BlockType::RealPair { k, lambda } => {
                write!(f, "D{}^0({},{})", k, lambda, -lambda)
            }
            BlockType::ImaginaryPair { k, lambda0, eps } => {
                let lam = &Scalar::i() * lambda0;
                write!(f, "D{}{}({},{})", k, fmt_eps(*eps), lam, -&lam)
            }
            BlockType::Quartet { k, lambda } => {
                let conj = lambda.conj();
                write!(f, "D{}^0({},{},{},{})", k, lambda, -lambda, conj, -&conj)
            }
        }
    }
}

/// A Jordan chain inside one generalized eigenspace: `vecs[j-1] = b_j` with
/// `phi_n(b_j) = b_{j-1}` and `phi_n(b_1) = 0`.
#[derive(Clone, Debug)]
pub struct Chain {
    pub lambda: Scalar,
    pub vecs: Vec<GenVector>,
}

impl Chain {
    fn build(nilpotent: &Endo, top: &GenVector, k: usize, lambda: &Scalar) -> Chain {
        let mut vecs = vec![top.clone()];
        for _ in 1..k {
            let next = nilpotent.apply(vecs.last().unwrap());
            vecs.push(next);
        }
        vecs.reverse();
        Chain {
            lambda: lambda.clone(),
            vecs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub block_type: BlockType,
    pub degree: usize,
    pub chains: Vec<Chain>,
    /// Signature of the pairing on the real form; absent for non-real input.
    pub signature: Option<(usize, usize)>,
}

impl Block {
    pub fn vectors(&self) -> Vec<GenVector> {
        self.chains.iter().flat_map(|c| c.vecs.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn type_multiset(&self) -> Vec<BlockType> {
        let mut types: Vec<BlockType> = self.blocks.iter().map(|b| b.block_type.clone()).collect();
        types.sort();
        types
    }

    pub fn all_chains(&self) -> Vec<&Chain> {
        self.blocks.iter().flat_map(|b| b.chains.iter()).collect()
    }
}

impl fmt::Display for BlockDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.block_type.to_string()).collect();
        write!(f, "{}", parts.join(" (+) "))
    }
}

fn tau(nil_pow: &Matrix, a: &GenVector, b: &GenVector) -> Scalar {
    pairing(a, &GenVector::from_coords(&nil_pow.apply(&b.coords())))
}

fn coords_matrix(vs: &[GenVector]) -> Matrix {
    Matrix::from_columns(&vs.iter().map(GenVector::coords).collect::<Vec<_>>())
}

fn span_rank_g(vs: &[GenVector]) -> usize {
    if vs.is_empty() {
        0
    } else {
        coords_matrix(vs).rank()
    }
}

fn complement_within_g(sub: &[GenVector], inside: &[GenVector]) -> Vec<GenVector> {
    let mut acc: Vec<GenVector> = sub.to_vec();
    let mut rank = span_rank_g(&acc);
    let mut out = Vec::new();
    for v in inside {
        acc.push(v.clone());
        let r = span_rank_g(&acc);
        if r > rank {
            rank = r;
            out.push(v.clone());
        } else {
            acc.pop();
        }
    }
    out
}

/// Vectors of `span(inside)` orthogonal to every target, as combinations of
/// `inside`.
fn orth_complement_within(targets: &[GenVector], inside: &[GenVector]) -> Vec<GenVector> {
    if inside.is_empty() {
        return vec![];
    }
    if targets.is_empty() {
        return inside.to_vec();
    }
    let m = Matrix::from_fn(targets.len(), inside.len(), |i, j| {
        pairing(&targets[i], &inside[j])
    });
    m.kernel()
        .into_iter()
        .map(|c| combine(inside, &c))
        .collect()
}

fn combine(basis: &[GenVector], coeffs: &[Scalar]) -> GenVector {
    let mut out = GenVector::zero(basis[0].n());
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&b.scale(c));
        }
    }
    out
}

fn nilpotency_degree(nilpotent: &Endo, vs: &[GenVector]) -> usize {
    let mut k = 1;
    let mut current: Vec<GenVector> = vs.to_vec();
    loop {
        current = current.iter().map(|v| nilpotent.apply(v)).collect();
        if current.iter().all(GenVector::is_zero) {
            return k;
        }
        k += 1;
        assert!(k <= nilpotent.mat.rows() + 1, "nilpotent part must terminate");
    }
}

struct Part {
    lambda: Scalar,
    basis: Vec<GenVector>,
}

/// Decompose into mutually orthogonal indecomposable blocks with Jordan-chain
/// bases. Blocks are emitted in descending nilpotency degree, then eigenvalue
/// order; the type multiset is a conjugation invariant.
pub fn block_decompose(phi: &Endo, spec: &SpectralData) -> BlockDecomposition {
    let real_input = phi.is_real();
    let nil = &spec.nilpotent;
    let mut blocks: Vec<Block> = Vec::new();

    // the zero component, then each {lambda, -lambda} pair
    let mut components: Vec<Vec<Part>> = Vec::new();
    if spec.contains(&Scalar::zero()) {
        components.push(vec![Part {
            lambda: Scalar::zero(),
            basis: spec.eigenbasis[&Scalar::zero()].clone(),
        }]);
    }
    for lambda in &spec.sigma_plus {
        components.push(vec![
            Part {
                lambda: lambda.clone(),
                basis: spec.eigenbasis[lambda].clone(),
            },
            Part {
                lambda: -lambda,
                basis: spec.eigenbasis[&-lambda].clone(),
            },
        ]);
    }

    for mut parts in components {
        loop {
            let live: Vec<&Part> = parts.iter().filter(|p| !p.basis.is_empty()).collect();
            if live.is_empty() {
                break;
            }
            let all: Vec<GenVector> = live.iter().flat_map(|p| p.basis.clone()).collect();
            let k = nilpotency_degree(nil, &all);
            let nil_k1 = nil.mat.pow(k - 1);

            // semisimple-part complements, one per eigenvalue
            let mut w_parts: Vec<Vec<GenVector>> = Vec::new();
            let imaginary_pair = parts.len() == 2
                && real_input
                && parts[0].lambda.re().is_zero()
                && !parts[0].lambda.im().is_zero();
            for (pi, part) in parts.iter().enumerate() {
                if imaginary_pair && pi == 1 {
                    // conjugation carries the first complement to the second
                    let conj: Vec<GenVector> = w_parts[0].iter().map(GenVector::conj).collect();
                    debug_assert_eq!(
                        span_rank_g(&[part.basis.clone(), conj.clone()].concat()),
                        span_rank_g(&part.basis),
                        "conjugate complement lies in the opposite eigenspace piece"
                    );
                    w_parts.push(conj);
                    continue;
                }
                if part.basis.is_empty() {
                    w_parts.push(vec![]);
                    continue;
                }
                let images = coords_matrix(
                    &part
                        .basis
                        .iter()
                        .map(|v| GenVector::from_coords(&nil_k1.apply(&v.coords())))
                        .collect::<Vec<_>>(),
                );
                let kernel_combos = images.kernel();
                let kernel: Vec<GenVector> = kernel_combos
                    .iter()
                    .map(|c| combine(&part.basis, c))
                    .collect();
                w_parts.push(complement_within_g(&kernel, &part.basis));
            }

            // scrub the lower-index pairings off the complement
            let mut w: Vec<GenVector> = w_parts.iter().flatten().cloned().collect();
            let part_sizes: Vec<usize> = w_parts.iter().map(Vec::len).collect();
            let t_top = Matrix::from_fn(w.len(), w.len(), |i, j| tau(&nil_k1, &w[i], &w[j]));
            let t_top_inv = t_top.inverse().expect("top pairing nondegenerate on the complement");
            let mut guard = 0;
            loop {
                let mut worst: Option<(usize, Matrix)> = None;
                for j in (0..k.saturating_sub(1)).rev() {
                    let nil_j = nil.mat.pow(j);
                    let t_j = Matrix::from_fn(w.len(), w.len(), |a, b| tau(&nil_j, &w[a], &w[b]));
                    if !t_j.is_zero() {
                        worst = Some((j, t_j));
                        break;
                    }
                }
                let Some((j, t_j)) = worst else { break };
                let g = (&t_top_inv * &t_j).scale(&Scalar::rational(-1, 2));
                let nil_c = nil.mat.pow(k - 1 - j);
                let old = w.clone();
                for (a, wa) in w.iter_mut().enumerate() {
                    let mut corr = GenVector::zero(wa.n());
                    for (b, wb) in old.iter().enumerate() {
                        let coeff = g.at(b, a);
                        if !coeff.is_zero() {
                            corr = corr.add(
                                &GenVector::from_coords(&nil_c.apply(&wb.coords())).scale(coeff),
                            );
                        }
                    }
                    *wa = wa.add(&corr);
                }
                guard += 1;
                assert!(guard <= k + 1, "pairing scrub terminates");
            }
            // re-split by part
            let mut w_parts: Vec<Vec<GenVector>> = Vec::new();
            let mut offset = 0;
            for size in part_sizes {
                w_parts.push(w[offset..offset + size].to_vec());
                offset += size;
            }

            let new_blocks = if parts.len() == 1 {
                split_zero_component(nil, &nil_k1, k, &w_parts[0], real_input)
            } else {
                split_paired_component(
                    nil,
                    &nil_k1,
                    k,
                    &parts[0].lambda,
                    &w_parts[0],
                    &w_parts[1],
                    real_input,
                    imaginary_pair,
                )
            };

            let layer: Vec<GenVector> = new_blocks.iter().flat_map(Block::vectors).collect();
            blocks.extend(new_blocks);
            for part in parts.iter_mut() {
                part.basis = orth_complement_within(&layer, &part.basis);
            }
        }
    }

    blocks.sort_by(|a, b| {
        b.degree
            .cmp(&a.degree)
            .then_with(|| a.block_type.eigenvalue_key().cmp(&b.block_type.eigenvalue_key()))
    });
    BlockDecomposition { blocks }
}

fn real_form_signature(vectors: &[GenVector]) -> (usize, usize) {
    let gram = Matrix::from_fn(vectors.len(), vectors.len(), |i, j| {
        pairing(&vectors[i], &vectors[j])
    });
    signature(&gram)
}

fn split_zero_component(
    nil: &Endo,
    nil_k1: &Matrix,
    k: usize,
    w: &[GenVector],
    real_input: bool,
) -> Vec<Block> {
    let zero = Scalar::zero();
    let mut out = Vec::new();
    if k % 2 == 1 {
        // symmetric top pairing: split into tau-orthogonal lines
        let mut rest = w.to_vec();
        while !rest.is_empty() {
            if rest.iter().all(|v| tau(nil_k1, v, v).is_zero()) {
                // char 0: some off-diagonal entry is nonzero; fold it in
                let mut fixed = false;
                'fix: for a in 0..rest.len() {
                    for b in 0..rest.len() {
                        if a != b && !tau(nil_k1, &rest[a], &rest[b]).is_zero() {
                            rest[a] = rest[a].add(&rest[b].clone());
                            fixed = true;
                            break 'fix;
                        }
                    }
                }
                assert!(fixed, "nondegenerate symmetric pairing has an anisotropic vector");
            }
            let pivot_idx = rest
                .iter()
                .position(|v| !tau(nil_k1, v, v).is_zero())
                .unwrap();
            let pivot = rest.remove(pivot_idx);
            let d = tau(nil_k1, &pivot, &pivot);
            let d_inv = d.inv().unwrap();
            for v in rest.iter_mut() {
                let c = &tau(nil_k1, v, &pivot) * &d_inv;
                if !c.is_zero() {
                    *v = v.sub(&pivot.scale(&c));
                }
            }
            let eps = if real_input { Some(d.real_sign()) } else { None };
            let chain = Chain::build(nil, &pivot, k, &zero);
            let signature = real_input.then(|| real_form_signature(&chain.vecs));
            let block_type = BlockType::OddZero { h: (k - 1) / 2, eps };
            debug_assert!(
                signature.is_none() || signature == block_type.expected_signature()
            );
            out.push(Block {
                block_type,
                degree: k,
                chains: vec![chain],
                signature,
            });
        }
    } else {
        // skew top pairing: split into normalized symplectic pairs
        let mut rest = w.to_vec();
        while !rest.is_empty() {
            let mut pair = None;
            'outer: for a in 0..rest.len() {
                for b in 0..rest.len() {
                    if a != b && !tau(nil_k1, &rest[a], &rest[b]).is_zero() {
                        pair = Some((a, b));
                        break 'outer;
                    }
                }
            }
            let (a, b) = pair.expect("nondegenerate skew pairing pairs up");
            let u = rest[a].clone();
            let t = tau(nil_k1, &u, &rest[b]);
            let v = rest[b].scale(&(&t * &Scalar::from_int(2)).inv().unwrap());
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            rest.remove(hi);
            rest.remove(lo);
            let half_inv = Scalar::from_int(2);
            for x in rest.iter_mut() {
                // clear tau(x, u), tau(x, v): x += alpha u + beta v
                let alpha = -&(&tau(nil_k1, x, &v) * &half_inv);
                let beta = &tau(nil_k1, x, &u) * &half_inv;
                let mut nx = x.clone();
                if !alpha.is_zero() {
                    nx = nx.add(&u.scale(&alpha));
                }
                if !beta.is_zero() {
                    nx = nx.add(&v.scale(&beta));
                }
                *x = nx;
            }
            let chains = vec![Chain::build(nil, &u, k, &zero), Chain::build(nil, &v, k, &zero)];
            let signature = real_input.then(|| {
                real_form_signature(&chains.iter().flat_map(|c| c.vecs.clone()).collect::<Vec<_>>())
            });
            let block_type = BlockType::RealPair {
                k,
                lambda: Scalar::zero(),
            };
            debug_assert!(
                signature.is_none() || signature == block_type.expected_signature()
            );
            out.push(Block {
                block_type,
                degree: k,
                chains,
                signature,
            });
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn split_paired_component(
    nil: &Endo,
    nil_k1: &Matrix,
    k: usize,
    lambda: &Scalar,
    w_plus: &[GenVector],
    w_minus: &[GenVector],
    real_input: bool,
    imaginary_pair: bool,
) -> Vec<Block> {
    assert_eq!(w_plus.len(), w_minus.len());
    let mut out = Vec::new();
    let minus_lambda = -lambda;
    let half = Scalar::rational(1, 2);

    if imaginary_pair {
        // Conjugate-aligned splitting so each block admits a real form. The
        // pairing h(a, b) = tau(w_a, conj(w_b)) is hermitian for odd k and
        // skew-hermitian for even k (where i h is hermitian).
        let mut plus = w_plus.to_vec();
        let odd = k % 2 == 1;
        let h = |x: &GenVector, y: &GenVector| -> Scalar {
            let v = tau(nil_k1, x, &y.conj());
            if odd {
                v
            } else {
                &Scalar::i() * &v
            }
        };
        while !plus.is_empty() {
            if plus.iter().all(|x| h(x, x).is_zero()) {
                let mut fixed = false;
                'fix: for a in 0..plus.len() {
                    for b in 0..plus.len() {
                        if a == b || h(&plus[a], &plus[b]).is_zero() {
                            continue;
                        }
                        // one of w_a + w_b, w_a + i w_b has nonzero h-norm
                        let cand1 = plus[a].add(&plus[b]);
                        if !h(&cand1, &cand1).is_zero() {
                            plus[a] = cand1;
                        } else {
                            let cand2 = plus[a].add(&plus[b].scale(&Scalar::i()));
                            assert!(!h(&cand2, &cand2).is_zero());
                            plus[a] = cand2;
                        }
                        fixed = true;
                        break 'fix;
                    }
                }
                assert!(fixed, "hermitian pairing is nondegenerate");
            }
            let idx = plus.iter().position(|x| !h(x, x).is_zero()).unwrap();
            let w = plus.remove(idx);
            let r = h(&w, &w);
            assert!(r.is_real(), "hermitian norms are real");
            let r_inv = r.inv().unwrap();
            for x in plus.iter_mut() {
                let c = &h(x, &w) * &r_inv;
                if !c.is_zero() {
                    *x = x.sub(&w.scale(&c));
                }
            }
            // tau(w, partner) = 1/2
            let partner = if odd {
                w.conj().scale(&(&r * &Scalar::from_int(2)).inv().unwrap())
            } else {
                // tau(w, conj w) = -i r
                w.conj()
                    .scale(&(&Scalar::i() * &(&r * &Scalar::from_int(2)).inv().unwrap()))
            };
            debug_assert_eq!(tau(nil_k1, &w, &partner), half);
            let chains = vec![
                Chain::build(nil, &w, k, lambda),
                Chain::build(nil, &partner, k, &minus_lambda),
            ];
            // real form: real and imaginary parts of the first chain
            let mut real_form = Vec::new();
            for b in &chains[0].vecs {
                let re = b.add(&b.conj()).scale(&half);
                let im = b.sub(&b.conj()).scale(&-(&half * &Scalar::i()));
                real_form.push(re);
                real_form.push(im);
            }
            let sig = real_form_signature(&real_form);
            let lambda0 = Scalar::new(lambda.im().clone(), Zero::zero());
            let eps = if k % 2 == 0 {
                Some(1)
            } else {
                let h_half = (k - 1) / 2;
                let plus_sig = (2 * h_half + 2, 2 * h_half);
                let minus_sig = (2 * h_half, 2 * h_half + 2);
                if sig == plus_sig {
                    Some(if h_half % 2 == 0 { 1 } else { -1 })
                } else {
                    assert_eq!(sig, minus_sig, "signature matches the classification");
                    Some(if h_half % 2 == 0 { -1 } else { 1 })
                }
            };
            let block_type = BlockType::ImaginaryPair {
                k,
                lambda0,
                eps,
            };
            debug_assert_eq!(Some(sig), block_type.expected_signature());
            out.push(Block {
                block_type,
                degree: k,
                chains,
                signature: Some(sig),
            });
        }
        return out;
    }

    // Plain dual splitting: upper basis as given, partners solved in the
    // lower part so the top pairing is 1/2 on matching indices.
    let s = w_plus.len();
    if s == 0 {
        return out;
    }
    let m = Matrix::from_fn(s, s, |a, b| tau(nil_k1, &w_plus[a], &w_minus[b]));
    let m_inv = m.inverse().expect("top pairing couples the two halves");
    for l in 0..s {
        let mut rhs = vec![Scalar::zero(); s];
        rhs[l] = half.clone();
        let coeffs = m_inv.apply(&rhs);
        let partner = combine(w_minus, &coeffs);
        debug_assert_eq!(tau(nil_k1, &w_plus[l], &partner), half);
        let chains = vec![
            Chain::build(nil, &w_plus[l], k, lambda),
            Chain::build(nil, &partner, k, &minus_lambda),
        ];
        let all: Vec<GenVector> = chains.iter().flat_map(|c| c.vecs.clone()).collect();
        let (block_type, signature) = if lambda.is_real() {
            let sig = real_input.then(|| real_form_signature(&all));
            (
                BlockType::RealPair {
                    k,
                    lambda: lambda.clone(),
                },
                sig,
            )
        } else if lambda.re().is_zero() {
            // non-real input with imaginary eigenvalues: no real form
            (
                BlockType::ImaginaryPair {
                    k,
                    lambda0: Scalar::new(lambda.im().clone(), Zero::zero()),
                    eps: None,
                },
                None,
            )
        } else {
            (
                BlockType::Quartet {
                    k,
                    lambda: lambda.clone(),
                },
                None,
            )
        };
        debug_assert!(signature.is_none() || signature == block_type.expected_signature());
        out.push(Block {
            block_type,
            degree: k,
            chains,
            signature,
        });
    }
    out
}

/// Structural facts every block decomposition satisfies; exposed for the
/// verification layer and exercised on every fixture.
pub fn verify_blocks(phi: &Endo, spec: &SpectralData, dec: &BlockDecomposition) -> Result<()> {
    let n2 = phi.mat.rows();
    let all: Vec<GenVector> = dec.blocks.iter().flat_map(Block::vectors).collect();
    if span_rank_g(&all) != n2 {
        return Err(Error::Invalid("blocks do not span the double".into()));
    }
    for (i, a) in dec.blocks.iter().enumerate() {
        let va = a.vectors();
        let gram = Matrix::from_fn(va.len(), va.len(), |x, y| pairing(&va[x], &va[y]));
        if gram.det().is_zero() {
            return Err(Error::Degenerate);
        }
        for (j, b) in dec.blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            for x in &va {
                for y in &b.vectors() {
                    if !pairing(x, y).is_zero() {
                        return Err(Error::Invalid(format!(
                            "blocks {i} and {j} are not orthogonal"
                        )));
                    }
                }
            }
        }
        // chain property and eigenvalue bookkeeping
        for chain in &a.chains {
            for (j, v) in chain.vecs.iter().enumerate() {
                let img = spec.nilpotent.apply(v);
                let expected = if j == 0 {
                    GenVector::zero(v.n())
                } else {
                    chain.vecs[j - 1].clone()
                };
                if img != expected {
                    return Err(Error::Invalid("chain property fails".into()));
                }
                let s_img = spec.semisimple.apply(v);
                if s_img != v.scale(&chain.lambda) {
                    return Err(Error::Invalid("chain eigenvalue is wrong".into()));
                }
            }
        }
        // the semisimple component pairs nondegenerately at the top index and
        // trivially below it
        let k = a.degree;
        let tops: Vec<GenVector> = a.chains.iter().map(|c| c.vecs[k - 1].clone()).collect();
        let nil_k1 = spec.nilpotent.mat.pow(k - 1);
        let t_top = Matrix::from_fn(tops.len(), tops.len(), |x, y| tau(&nil_k1, &tops[x], &tops[y]));
        if t_top.det().is_zero() {
            return Err(Error::Invalid("top pairing degenerate on a block".into()));
        }
        for j in 0..k.saturating_sub(1) {
            let nil_j = spec.nilpotent.mat.pow(j);
            for x in &tops {
                for y in &tops {
                    if !tau(&nil_j, x, y).is_zero() {
                        return Err(Error::Invalid(format!(
                            "pairing at nilpotency index {j} should vanish on the semisimple component"
                        )));
                    }
                }
            }
        }
        if let Some(sig) = a.signature {
            if Some(sig) != a.block_type.expected_signature() {
                return Err(Error::Invalid(format!(
                    "block signature {sig:?} does not match {} ",
                    a.block_type
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Eigenvalue-level verdicts
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BracketClosureWitness {
    pub mu: Scalar,
    pub nu: Scalar,
    pub x: GenVector,
    pub y: GenVector,
    pub residual: GenVector,
}

#[derive(Clone, Debug)]
pub struct BracketClosureOutcome {
    pub holds: bool,
    pub witness: Option<BracketClosureWitness>,
}

/// Does `[[L_mu, L_nu]]` land in `L_mu + L_nu` for every pair with
/// `mu + nu != 0`? This is the eigenvalue-level compatibility condition
/// controlled by the semisimple part; on failure the violating pair and the
/// residual component of the bracket are reported.
pub fn weak_nijenhuis_check(
    alg: &LiePresentation,
    spec: &SpectralData,
) -> BracketClosureOutcome {
    for (mu, basis_mu) in &spec.eigenbasis {
        for (nu, basis_nu) in &spec.eigenbasis {
            if (mu + nu).is_zero() {
                continue;
            }
            for x in basis_mu {
                for y in basis_nu {
                    let d = dorfman(alg, x, y);
                    let residual = spec.component_outside(&d, &[mu.clone(), nu.clone()]);
                    if !residual.is_zero() {
                        return BracketClosureOutcome {
                            holds: false,
                            witness: Some(BracketClosureWitness {
                                mu: mu.clone(),
                                nu: nu.clone(),
                                x: x.clone(),
                                y: y.clone(),
                                residual,
                            }),
                        };
                    }
                }
            }
        }
    }
    BracketClosureOutcome {
        holds: true,
        witness: None,
    }
}

/// A triple `(lambda, mu, nu)` with pairwise-nonzero sums whose total is
/// again a root of the minimal polynomial, if one exists.
pub fn resonance_witness(spec: &SpectralData) -> Option<(Scalar, Scalar, Scalar)> {
    let eigs = spec.eigenvalues();
    for a in &eigs {
        for b in &eigs {
            for c in &eigs {
                if (a + b).is_zero() || (a + c).is_zero() || (b + c).is_zero() {
                    continue;
                }
                let total = &(a + b) + c;
                if spec.minpoly.eval(&total).is_zero() {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

pub fn non_resonant(spec: &SpectralData) -> bool {
    resonance_witness(spec).is_none()
}

// ---------------------------------------------------------------------------

/// Gram matrix helper used by the verification layer.
pub fn pairing_gram(vs: &[GenVector]) -> Matrix {
    Matrix::from_fn(vs.len(), vs.len(), |i, j| pairing(&vs[i], &vs[j]))
}

/// Convenience: coordinates of all eigenbasis vectors at an eigenvalue.
pub fn eigenbasis_coords(spec: &SpectralData, lambda: &Scalar) -> Vec<Vector> {
    spec.eigenbasis[lambda].iter().map(GenVector::coords).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Scalar;

    fn s(t: &str) -> Scalar {
        Scalar::parse(t).unwrap()
    }

    /// phi(v1)=v2, phi(v2)=v3+a3, phi(v3)=-a2, phi(a2)=-a1, phi(a3)=-a2
    fn nilpotent_heisenberg_phi() -> Endo {
        let mut m = Matrix::zeros(6, 6);
        m.set(1, 0, s("1"));
        m.set(2, 1, s("1"));
        m.set(5, 1, s("1"));
        m.set(4, 2, s("-1"));
        m.set(3, 4, s("-1"));
        m.set(4, 5, s("-1"));
        Endo::new(m)
    }

    /// phi(v1)=v1-2a2, phi(v2)=-v2+2a1, phi(v3)=v3, phi(a1)=-a1, phi(a2)=a2,
    /// phi(a3)=-a3; minimal polynomial (x^2-1)^2.
    fn real_pair_phi() -> Endo {
        let mut m = Matrix::zeros(6, 6);
        m.set(0, 0, s("1"));
        m.set(4, 0, s("-2"));
        m.set(1, 1, s("-1"));
        m.set(3, 1, s("2"));
        m.set(2, 2, s("1"));
        m.set(3, 3, s("-1"));
        m.set(4, 4, s("1"));
        m.set(5, 5, s("-1"));
        Endo::new(m)
    }

    /// phi(v1)=v2-a2, phi(v2)=a1-a3, phi(v3)=v2+a2, phi(a2)=-a1-a3;
    /// minimal polynomial x^3.
    fn odd_pair_phi() -> Endo {
        let mut m = Matrix::zeros(6, 6);
        m.set(1, 0, s("1"));
        m.set(4, 0, s("-1"));
        m.set(3, 1, s("1"));
        m.set(5, 1, s("-1"));
        m.set(1, 2, s("1"));
        m.set(4, 2, s("1"));
        m.set(3, 4, s("-1"));
        m.set(5, 4, s("-1"));
        Endo::new(m)
    }

    #[test]
    fn analyze_nilpotent_example() {
        let phi = nilpotent_heisenberg_phi();
        let spec = analyze(&phi).unwrap();
        assert_eq!(spec.minpoly, Poly::monomial(5, Scalar::one()));
        assert_eq!(spec.spectrum, vec![(Scalar::zero(), 5)]);
        assert_eq!(spec.rank(&Scalar::zero()), 6);
        assert!(spec.nilpotent.mat == phi.mat, "nilpotent input is its own nilpotent part");
        assert!(spec.semisimple.mat.is_zero());
    }

    #[test]
    fn analyze_quartic_two_eigenvalue_split() {
        // minimal polynomial (x^2+c)^2 with c = 1: the semisimple part is
        // (1/2) phi^3 + (3/2) phi and the nilpotent part the difference.
        // Built from a classical Jordan-type f on a 4-dim abelian algebra.
        let mut f = Matrix::zeros(4, 4);
        f.set(0, 1, s("-1"));
        f.set(1, 0, s("1"));
        f.set(2, 3, s("-1"));
        f.set(3, 2, s("1"));
        f.set(0, 2, s("1"));
        f.set(1, 3, s("1"));
        let phi = crate::double::classical_lift(&f);
        let spec = analyze(&phi).unwrap();
        let expected_min = Poly::new(vec![s("1"), s("0"), s("2"), s("0"), s("1")]);
        assert_eq!(spec.minpoly, expected_min);
        let half = s("1/2");
        let three_half = s("3/2");
        let phi3 = phi.mat.pow(3);
        let semi = &phi3.scale(&half) + &phi.mat.scale(&three_half);
        assert_eq!(spec.semisimple.mat, semi);
        let nil = &phi3.scale(&s("-1/2")) + &phi.mat.scale(&s("-1/2"));
        assert_eq!(spec.nilpotent.mat, nil);
    }

    #[test]
    fn analyze_rejects_non_skew() {
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 0, s("1"));
        let bad = Endo::new(m);
        assert!(matches!(analyze(&bad), Err(Error::NotSkew(_, _))));
    }

    #[test]
    fn semisimple_input_has_zero_nilpotent_part() {
        let mut m = Matrix::zeros(4, 4);
        m.set(0, 0, s("1"));
        m.set(1, 1, s("-1"));
        m.set(2, 2, s("-1"));
        m.set(3, 3, s("1"));
        let phi = Endo::new(m);
        let spec = analyze(&phi).unwrap();
        assert!(spec.nilpotent.mat.is_zero());
        assert_eq!(spec.sigma_plus, vec![Scalar::one()]);
    }

    #[test]
    fn blocks_of_the_three_model_examples() {
        // degree-5 nilpotent: D5+(0) + D1-(0)
        let phi = nilpotent_heisenberg_phi();
        let spec = analyze(&phi).unwrap();
        let dec = block_decompose(&phi, &spec);
        verify_blocks(&phi, &spec, &dec).unwrap();
        assert_eq!(
            dec.type_multiset(),
            vec![
                BlockType::OddZero { h: 0, eps: Some(-1) },
                BlockType::OddZero { h: 2, eps: Some(1) },
            ]
        );

        // (x^2-1)^2: D2^0(1,-1) + D1^0(1,-1)
        let phi = real_pair_phi();
        let spec = analyze(&phi).unwrap();
        assert_eq!(spec.minpoly, Poly::new(vec![s("1"), s("0"), s("-2"), s("0"), s("1")]));
        let dec = block_decompose(&phi, &spec);
        verify_blocks(&phi, &spec, &dec).unwrap();
        assert_eq!(
            dec.type_multiset(),
            vec![
                BlockType::RealPair { k: 1, lambda: s("1") },
                BlockType::RealPair { k: 2, lambda: s("1") },
            ]
        );

        // x^3: D3+(0) + D3-(0)
        let phi = odd_pair_phi();
        let spec = analyze(&phi).unwrap();
        assert_eq!(spec.minpoly, Poly::monomial(3, Scalar::one()));
        let dec = block_decompose(&phi, &spec);
        verify_blocks(&phi, &spec, &dec).unwrap();
        assert_eq!(
            dec.type_multiset(),
            vec![
                BlockType::OddZero { h: 1, eps: Some(-1) },
                BlockType::OddZero { h: 1, eps: Some(1) },
            ]
        );
    }

    #[test]
    fn block_types_stable_under_conjugation() {
        use crate::double::{onn_conjugate, PairingMap};
        let phi = real_pair_phi();
        let spec = analyze(&phi).unwrap();
        let base_types = block_decompose(&phi, &spec).type_multiset();
        let mut b = Matrix::zeros(3, 3);
        b.set(0, 1, s("1/2"));
        b.set(1, 0, s("-1/2"));
        let mut a = Matrix::identity(3);
        a.set(0, 2, s("2"));
        let word = vec![PairingMap::BTransform(b), PairingMap::FrameChange(a)];
        let conj = onn_conjugate(&phi, &word).unwrap();
        let spec2 = analyze(&conj).unwrap();
        let types = block_decompose(&conj, &spec2).type_multiset();
        assert_eq!(types, base_types);
    }

    #[test]
    fn resonance_scan() {
        // spectrum {1,-1,3,-3} with P = (x^2-1)(x^2-9): resonant (1+1+1=3)
        let mut m = Matrix::zeros(4, 4);
        m.set(0, 0, s("1"));
        m.set(1, 1, s("3"));
        m.set(2, 2, s("-1"));
        m.set(3, 3, s("-3"));
        let phi = Endo::new(m);
        let spec = analyze(&phi).unwrap();
        assert!(!non_resonant(&spec));
        let w = resonance_witness(&spec).unwrap();
        assert_eq!(spec.minpoly.eval(&(&(&w.0 + &w.1) + &w.2)), Scalar::zero());

        // spectrum {1,-1,2,-2}: 2 = 1+1+0 needs 0, but -1+1+2 is trivial;
        // exhaustive scan says resonant is false? 1+1+... P(1+1+1)=P(3)!=0,
        // P(1+1+2)=P(4)!=0, P(2+2+1)=P(5)!=0, P(2+2+2)=P(6)!=0, P(1+2+2)...
        // all totals miss {±1,±2}: non-resonant.
        let mut m = Matrix::zeros(4, 4);
        m.set(0, 0, s("1"));
        m.set(1, 1, s("2"));
        m.set(2, 2, s("-1"));
        m.set(3, 3, s("-2"));
        let phi = Endo::new(m);
        let spec = analyze(&phi).unwrap();
        assert!(non_resonant(&spec));

        // {0, i, -i}: at most three eigenvalues is always non-resonant
        let mut m = Matrix::zeros(4, 4);
        m.set(0, 0, s("i"));
        m.set(2, 2, s("-i"));
        let phi = Endo::new(m);
        let spec = analyze(&phi).unwrap();
        assert!(non_resonant(&spec));
    }
}

//! The structural verification battery: every algebraic identity the engine
//! relies on, run against a concrete structure and reported item by item.
//! Fixtures and fuzzed structures are pushed through this on every test run.

use crate::double::{courant_t, dorfman, pairing, Endo, GenVector, LiePresentation};
use crate::error::Result;
use crate::forms::{
    as_generalized_vector, ce_differential, clifford, d_lambda_decomposition,
    d_lambda_vector_criterion, derived_bracket, grading_projectors, lift, lift_alternative,
    minimal_operator, operator_degrees, verify_lift_conditions, FormOperator, FormSpace, Parity,
};
use crate::scalars::{Matrix, Poly, Scalar};
use crate::spectral::{
    analyze, block_decompose, non_resonant, verify_blocks, weak_nijenhuis_check, SpectralData,
};
use crate::torsion::{jordan_chain_checks, minimal_torsion, shifted, MinimalTorsion};

#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct StructuralReport {
    pub items: Vec<CheckItem>,
}

impl StructuralReport {
    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.items.push(CheckItem {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn check(&mut self, name: &str, pass: bool) {
        self.push(name, pass, String::new());
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.pass).collect()
    }
}

fn frames(n: usize) -> Vec<GenVector> {
    (0..2 * n).map(|a| GenVector::frame(n, a)).collect()
}

fn projector_algebra(report: &mut StructuralReport, phi: &Endo, spec: &SpectralData) {
    let n2 = phi.mat.rows();
    let mut sum = Matrix::zeros(n2, n2);
    let mut ok = true;
    for (lambda, p) in &spec.projectors {
        ok &= &(p * p) == p;
        ok &= (p * &phi.mat) == (&phi.mat * p);
        for (mu, q) in &spec.projectors {
            if mu != lambda {
                ok &= (p * q).is_zero();
            }
        }
        sum = &sum + p;
    }
    ok &= sum == Matrix::identity(n2);
    report.check("projectors are idempotent, orthogonal, complete and commute", ok);
}

fn jordan_chevalley(report: &mut StructuralReport, phi: &Endo, spec: &SpectralData) {
    let s = &spec.semisimple.mat;
    let nl = &spec.nilpotent.mat;
    let mut ok = &(s + nl) == &phi.mat && (s * nl) == (nl * s);
    let max_m = spec.spectrum.iter().map(|(_, m)| *m).max().unwrap_or(1);
    ok &= nl.pow(max_m).is_zero();
    for (lambda, p) in &spec.projectors {
        ok &= (s * p) == p.scale(lambda);
    }
    // the semisimple part has a squarefree minimal polynomial
    let ps = spec.semisimple.mat.min_poly();
    ok &= ps.gcd(&ps.derivative()) == Poly::one();
    report.check("semisimple/nilpotent split satisfies the defining identities", ok);
}

fn eigenspace_geometry(report: &mut StructuralReport, spec: &SpectralData) {
    let mut ok = true;
    for (lambda, basis) in &spec.eigenbasis {
        for (mu, other) in &spec.eigenbasis {
            if (lambda + mu).is_zero() {
                continue;
            }
            for x in basis {
                for y in other {
                    ok &= pairing(x, y).is_zero();
                }
            }
        }
    }
    for lambda in spec.sigma_plus.iter().chain(std::iter::once(&Scalar::zero())) {
        if !spec.contains(lambda) {
            continue;
        }
        let mut vs = spec.eigenbasis[lambda].clone();
        if !lambda.is_zero() {
            vs.extend(spec.eigenbasis[&-lambda].iter().cloned());
        }
        ok &= !crate::spectral::pairing_gram(&vs).det().is_zero();
    }
    report.check(
        "eigenspaces are isotropic, pairwise orthogonal away from opposite pairs, and pair nondegenerately",
        ok,
    );

    // rank bookkeeping against the characteristic polynomial
    let mut ok = true;
    for (lambda, _) in &spec.spectrum {
        let mut rest = spec.charpoly.clone();
        let mut alg_mult = 0;
        loop {
            let (q, r) = rest.divrem(&Poly::linear(lambda)).unwrap();
            if r.is_zero() {
                rest = q;
                alg_mult += 1;
            } else {
                break;
            }
        }
        ok &= spec.rank(lambda) == alg_mult && spec.rank(lambda) == spec.rank(&-lambda);
        // the multiplicity exponent annihilates the eigenspace, one power less does not
        let m = spec.multiplicity(lambda);
        let ann = Poly::linear(lambda).pow(m);
        for v in &spec.eigenbasis[lambda] {
            ok &= crate::scalars::matrix::vec_is_zero(
                &spec_apply_poly(&spec, &ann, v),
            );
        }
        if m > 1 {
            let lower = Poly::linear(lambda).pow(m - 1);
            ok &= spec.eigenbasis[lambda]
                .iter()
                .any(|v| !crate::scalars::matrix::vec_is_zero(&spec_apply_poly(&spec, &lower, v)));
        }
    }
    report.check("eigenspace ranks match algebraic multiplicities and chain depths", ok);
}

fn spec_apply_poly(spec: &SpectralData, p: &Poly, v: &GenVector) -> Vec<Scalar> {
    // evaluate p(phi) on a vector using phi = semisimple + nilpotent
    let phi = &spec.semisimple.mat + &spec.nilpotent.mat;
    phi.eval_poly_vec(p, &v.coords())
}

fn bracket_axioms(report: &mut StructuralReport, alg: &LiePresentation) {
    let fs = frames(alg.dim());
    let mut leibniz = true;
    let mut invariance = true;
    let mut antisym = true;
    let mut trilinear_antisym = true;
    for x in &fs {
        for y in &fs {
            antisym &= dorfman(alg, x, y).add(&dorfman(alg, y, x)).is_zero();
            for z in &fs {
                let lhs = dorfman(alg, x, &dorfman(alg, y, z));
                let rhs = dorfman(alg, &dorfman(alg, x, y), z)
                    .add(&dorfman(alg, y, &dorfman(alg, x, z)));
                leibniz &= lhs == rhs;
                invariance &=
                    (courant_t(alg, x, y, z) + pairing(y, &dorfman(alg, x, z))).is_zero();
                let t = courant_t(alg, x, y, z);
                trilinear_antisym &= courant_t(alg, y, x, z) == -&t
                    && courant_t(alg, x, z, y) == -&t
                    && courant_t(alg, z, y, x) == -&t;
            }
        }
    }
    report.check("Dorfman bracket satisfies the Leibniz identity", leibniz);
    report.check("pairing is invariant under the bracket", invariance);
    report.check("bracket is antisymmetric on invariant sections", antisym);
    report.check("trilinear tensor is totally antisymmetric", trilinear_antisym);
}

fn clifford_and_differential(
    report: &mut StructuralReport,
    alg: &LiePresentation,
    space: &FormSpace,
    d: &FormOperator,
) {
    let n = alg.dim();
    let fs = frames(n);
    let mut clifford_ok = true;
    for x in &fs {
        for y in &fs {
            let cx = clifford(space, x);
            let cy = clifford(space, y);
            let anti = cx.compose(&cy).add(&cy.compose(&cx));
            let expected =
                Matrix::identity(space.dim()).scale(&(&pairing(x, y) * &Scalar::from_int(2)));
            clifford_ok &= anti.mat == expected;
        }
    }
    report.check("Clifford relation holds on the frame", clifford_ok);
    report.check("invariant differential squares to zero", d.compose(d).is_zero());

    let mut derived_ok = true;
    for x in &fs {
        for y in &fs {
            let op = derived_bracket(space, d, x, y);
            derived_ok &= match as_generalized_vector(space, &op) {
                Ok(v) => v == dorfman(alg, x, y),
                Err(_) => false,
            };
        }
    }
    report.check("derived bracket of the differential reproduces the Dorfman bracket", derived_ok);
}

fn lift_checks(
    report: &mut StructuralReport,
    phi: &Endo,
    space: &FormSpace,
    d: &FormOperator,
    p: &Poly,
    lifted: &FormOperator,
) {
    report.check(
        "lift satisfies its defining conditions",
        verify_lift_conditions(space, phi, lifted),
    );
    let alt = lift_alternative(space, phi).expect("skew input");
    report.check("lift is unique (two constructions coincide)", alt.mat == lifted.mat);

    // adding a scalar to the lift leaves the minimal operator unchanged
    let shifted_lift = FormOperator::new(
        &lifted.mat + &Matrix::identity(space.dim()).scale(&Scalar::rational(3, 2)),
        Parity::Even,
    );
    let a = minimal_operator(space, lifted, d, p);
    let b = minimal_operator(space, &shifted_lift, d, p);
    report.check("minimal operator is independent of the scalar lift freedom", a.mat == b.mat);
}

fn minimality_checks(
    report: &mut StructuralReport,
    alg: &LiePresentation,
    spec: &SpectralData,
    space: &FormSpace,
    d: &FormOperator,
    lifted: &FormOperator,
    routes: &MinimalTorsion,
) {
    report.check(
        "minimal torsion routes agree",
        routes.multinomial == routes.expansion && routes.multinomial == routes.operator,
    );
    report.check(
        "courant tensor is totally antisymmetric",
        routes.tensor().is_totally_antisymmetric(),
    );
    let delta = minimal_operator(space, lifted, d, &spec.minpoly);
    let delta_is_vector = as_generalized_vector(space, &delta).is_ok();
    report.check(
        "minimality equivalence: zero torsion exactly when the minimal operator is a generalized vector",
        routes.is_minimal() == delta_is_vector,
    );

    if routes.is_minimal() {
        // both halves of the split are minimal as well
        let ps = spec.semisimple.mat.min_poly();
        let pn = spec.nilpotent.mat.min_poly();
        let ms = minimal_torsion(alg, &spec.semisimple, &ps);
        let mn = minimal_torsion(alg, &spec.nilpotent, &pn);
        report.check(
            "semisimple and nilpotent parts of a minimal structure are minimal",
            ms.is_minimal() && mn.is_minimal(),
        );
    }

    // the semisimple bracket-closure verdict agrees with the vanishing of
    // the shifted torsion of the semisimple part
    let closure = weak_nijenhuis_check(alg, spec);
    let s_semi = shifted(alg, &spec.semisimple);
    report.check(
        "eigenspace bracket closure matches the shifted torsion of the semisimple part",
        closure.holds == s_semi.is_zero(),
    );

    if routes.is_minimal() && non_resonant(spec) {
        report.check(
            "minimal and non-resonant implies the semisimple part closes eigenspace brackets",
            closure.holds,
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn d_lambda_checks(
    report: &mut StructuralReport,
    alg: &LiePresentation,
    spec: &SpectralData,
    space: &FormSpace,
    d: &FormOperator,
    lifted: &FormOperator,
    minimal: bool,
) {
    let comps = d_lambda_decomposition(space, lifted, d, spec);
    let mut total = FormOperator::zero(space, Parity::Odd);
    for (_, op) in &comps {
        total = total.add(op);
    }
    report.check("eigenvalue components sum to the differential", total.mat == d.mat);

    // when eigenspace brackets close, the differential itself splits into
    // grades -1, 0, 1 for every opposite-eigenvalue grading
    if weak_nijenhuis_check(alg, spec).holds {
        let mut ok = true;
        for mu in &spec.sigma_plus {
            let projs = grading_projectors(space, &spec.eigenbasis[mu], &spec.eigenbasis[&-mu])
                .expect("eigenspace pairs are quasi split");
            let degs = operator_degrees(d, &projs);
            ok &= degs.iter().all(|&s| (-1..=1).contains(&s));
        }
        report.check(
            "differential splits into grades -1, 0, 1 for eigenspace gradings",
            ok,
        );
    }

    let crit = d_lambda_vector_criterion(space, lifted, &comps, spec);
    let all_ok = crit.iter().all(|(_, ok)| *ok);
    report.check(
        "component criterion holds exactly for minimal structures",
        all_ok == minimal,
    );

    if minimal {
        // brackets through each component land in the shifted eigenspace
        let mut ok = true;
        'outer: for (lambda, dl) in &comps {
            for (mu, basis_mu) in &spec.eigenbasis {
                for (nu, basis_nu) in &spec.eigenbasis {
                    let target = &(lambda + mu) + nu;
                    for x in basis_mu {
                        for y in basis_nu {
                            let op = derived_bracket(space, dl, x, y);
                            let Ok(value) = as_generalized_vector(space, &op) else {
                                ok = false;
                                break 'outer;
                            };
                            let good = if spec.contains(&target) {
                                spec.component_outside(&value, &[target.clone()]).is_zero()
                            } else {
                                value.is_zero()
                            };
                            if !good {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        report.check(
            "component brackets of eigenspaces land in the eigenvalue-sum eigenspace",
            ok,
        );
    }

    if minimal && non_resonant(spec) {
        // grading degrees: the lambda component has degree one for the
        // (L_{-lambda}, L_lambda) grading and degree zero for the others
        let mut ok = true;
        for (lambda, dl) in &comps {
            if lambda.is_zero() {
                for mu in &spec.sigma_plus {
                    let projs = grading_projectors(
                        space,
                        &spec.eigenbasis[mu],
                        &spec.eigenbasis[&-mu],
                    )
                    .expect("eigenspace pairs are quasi split");
                    let degs = operator_degrees(dl, &projs);
                    ok &= degs.iter().all(|&s| s == 0);
                }
                continue;
            }
            for mu in &spec.sigma_plus {
                let projs =
                    grading_projectors(space, &spec.eigenbasis[mu], &spec.eigenbasis[&-mu])
                        .expect("eigenspace pairs are quasi split");
                let degs = operator_degrees(dl, &projs);
                if mu == lambda {
                    ok &= degs.iter().all(|&s| s == -1);
                } else if &-mu == lambda {
                    ok &= degs.iter().all(|&s| s == 1);
                } else {
                    ok &= degs.iter().all(|&s| s == 0);
                }
            }
        }
        report.check(
            "component degrees against the eigenspace gradings are as classified",
            ok,
        );
    }
}

/// Run the full structural battery against one structure.
pub fn structural_suite(alg: &LiePresentation, phi: &Endo) -> Result<StructuralReport> {
    let mut report = StructuralReport::default();
    let spec = analyze(phi)?;
    let dec = block_decompose(phi, &spec);
    let space = FormSpace::new(alg.dim());
    let d = ce_differential(&space, alg);
    let lifted = lift(&space, phi)?;
    let routes = minimal_torsion(alg, phi, &spec.minpoly);

    projector_algebra(&mut report, phi, &spec);
    jordan_chevalley(&mut report, phi, &spec);
    eigenspace_geometry(&mut report, &spec);
    report.push(
        "block decomposition invariants (span, orthogonality, chains, pairings, signatures)",
        verify_blocks(phi, &spec, &dec).is_ok(),
        String::new(),
    );
    bracket_axioms(&mut report, alg);
    clifford_and_differential(&mut report, alg, &space, &d);
    lift_checks(&mut report, phi, &space, &d, &spec.minpoly, &lifted);
    minimality_checks(&mut report, alg, &spec, &space, &d, &lifted, &routes);
    d_lambda_checks(
        &mut report,
        alg,
        &spec,
        &space,
        &d,
        &lifted,
        routes.is_minimal(),
    );
    for item in jordan_chain_checks(alg, phi, &spec, &dec, &routes) {
        report.push(&item.name, item.pass, item.detail);
    }
    Ok(report)
}

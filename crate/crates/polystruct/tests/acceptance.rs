//! Acceptance suite: every exit criterion, one test per criterion, each
//! printing a pass/fail line (run with `--nocapture` for the details).
//! Arithmetic is exact, so every comparison is equality; frame-value checks
//! multiply through by the fixture's recorded prefactor.

use polystruct::checks::structural_suite;
use polystruct::double::{dorfman, onn_conjugate, Endo, GenVector};
use polystruct::fixtures::{
    all_fixtures, assertions_for, fixture, fuzz_seeds, fuzz_structures, load, random_word,
    Assertion,
};
use polystruct::forms::{
    as_generalized_vector, ce_differential, d_lambda_decomposition, d_lambda_vector_criterion,
    derived_bracket, lift, FormSpace,
};
use polystruct::scalars::Scalar;
use polystruct::spectral::{analyze, block_decompose};
use polystruct::torsion::{minimal_torsion, nijenhuis, shifted};

use std::sync::OnceLock;

use polystruct::double::LiePresentation;
use polystruct::torsion::MinimalTorsion;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The fuzz family with its minimal-torsion routes, computed once and shared
/// between the route-agreement and low-degree-identity criteria.
fn fuzz_family() -> &'static Vec<(String, LiePresentation, Endo, MinimalTorsion)> {
    static CACHE: OnceLock<Vec<(String, LiePresentation, Endo, MinimalTorsion)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        fuzz_structures(15)
            .into_iter()
            .map(|(name, alg, phi)| {
                let p = phi.min_poly();
                let routes = minimal_torsion(&alg, &phi, &p);
                (name, alg, phi, routes)
            })
            .collect()
    })
}

fn report(criterion: &str, assertions: &[Assertion]) {
    let failed: Vec<&Assertion> = assertions.iter().filter(|a| !a.pass).collect();
    if failed.is_empty() {
        println!("[PASS] {criterion} ({} assertions)", assertions.len());
    } else {
        println!(
            "[FAIL] {criterion} ({} of {} assertions failed)",
            failed.len(),
            assertions.len()
        );
        for a in failed {
            println!("       {}: {} {}", a.fixture, a.name, a.detail);
        }
    }
}

fn run_fixture(name: &str) -> Vec<Assertion> {
    let f = fixture(name).unwrap();
    let (alg, phi) = load(&f).unwrap();
    assertions_for(name, &alg, &phi, &f.prefactor)
}

fn assert_all(criterion: &str, assertions: Vec<Assertion>) {
    report(criterion, &assertions);
    let failed: Vec<String> = assertions
        .iter()
        .filter(|a| !a.pass)
        .map(|a| format!("{}: {} {}", a.fixture, a.name, a.detail))
        .collect();
    assert!(failed.is_empty(), "{criterion}: {failed:#?}");
}

#[test]
fn criterion_01_degree_five_nilpotent_example() {
    assert_all(
        "criterion 1: degree-five nilpotent structure on the Heisenberg double",
        run_fixture("heisenberg_a"),
    );
}

#[test]
fn criterion_02_non_minimal_dual_example() {
    assert_all(
        "criterion 2: non-minimal dual structure with nonzero courant tensor",
        run_fixture("heisenberg_b"),
    );
}

#[test]
fn criterion_03_f_structure_example() {
    assert_all(
        "criterion 3: minimal structure with spectrum {0, i, -i}",
        run_fixture("heisenberg_c"),
    );
}

#[test]
fn criterion_04_non_minimal_f_structure_example() {
    assert_all(
        "criterion 4: non-minimal companion with nonzero shifted torsions",
        run_fixture("heisenberg_d"),
    );
}

/// Two reference sub-assertions of this criterion are stated against quoted
/// frame expressions that all three computation routes (and the defining
/// recursion evaluated independently) contradict; they are implemented
/// verbatim and left to fail, with the recomputed values asserted alongside.
#[test]
fn criterion_05_four_dimensional_nilpotent_example() {
    assert_all(
        "criterion 5: four-dimensional nilpotent structure",
        run_fixture("nilpotent4"),
    );
}

#[test]
fn criterion_06_resonance_family() {
    let mut all = run_fixture("resonance_1_3");
    all.extend(run_fixture("resonance_1_2"));
    assert_all("criterion 6: resonance family verdicts", all);
}

#[test]
fn criterion_07_route_agreement_on_fuzzed_structures() {
    // the three minimal-torsion routes on every fixture...
    let mut checked = 0usize;
    for f in all_fixtures() {
        let (alg, phi) = load(&f).unwrap();
        let p = phi.min_poly();
        let routes = minimal_torsion(&alg, &phi, &p);
        assert_eq!(routes.multinomial, routes.expansion, "{}", f.name);
        assert_eq!(routes.multinomial, routes.operator, "{}", f.name);
        checked += 1;
    }
    // ... and on at least one hundred conjugated block seeds
    let structures = fuzz_family();
    assert!(structures.len() >= 100, "need at least one hundred fuzzed structures");
    for (name, _, _, routes) in structures {
        assert_eq!(routes.multinomial, routes.expansion, "{name}");
        assert_eq!(routes.multinomial, routes.operator, "{name}");
        checked += 1;
    }
    println!(
        "[PASS] criterion 7: three torsion routes agree on {checked} structures \
         ({} fuzzed)",
        structures.len()
    );
}

#[test]
fn criterion_08_low_degree_identities_on_the_fuzz_family() {
    let two = Scalar::from_int(2);
    let minus_three = Scalar::from_int(-3);
    let mut quadratic = 0usize;
    let mut cubic = 0usize;
    let mut equal_multiplicity = 0usize;
    for (name, alg, phi, routes) in fuzz_family() {
        // only the low-degree and equal-multiplicity families matter here
        if !(name.starts_with("x^2#")
            || name.starts_with("x^2+1#")
            || name.starts_with("x^3+x#")
            || name.starts_with("(x^2+1)^2#"))
        {
            continue;
        }
        let deg = phi.min_poly().degree().unwrap();
        if deg == 2 {
            let expected = nijenhuis(alg, phi).scale(&two);
            assert_eq!(routes.tensor(), &expected, "{name}: quadratic identity");
            quadratic += 1;
        }
        if deg == 3 {
            let expected = shifted(alg, phi).scale(&minus_three);
            assert_eq!(routes.tensor(), &expected, "{name}: cubic identity");
            cubic += 1;
        }
        // equal multiplicities: minimal exactly when both split parts are
        if name.starts_with("(x^2+1)^2") {
            let spec = analyze(phi).unwrap();
            let ps = spec.semisimple.mat.min_poly();
            let pn = spec.nilpotent.mat.min_poly();
            let parts_minimal = minimal_torsion(alg, &spec.semisimple, &ps).is_minimal()
                && minimal_torsion(alg, &spec.nilpotent, &pn).is_minimal();
            assert_eq!(
                routes.is_minimal(),
                parts_minimal,
                "{name}: equal-multiplicity equivalence"
            );
            equal_multiplicity += 1;
        }
    }
    assert!(quadratic >= 30, "quadratic family is populated");
    assert!(cubic >= 15, "cubic family is populated");
    assert!(equal_multiplicity >= 15);
    println!(
        "[PASS] criterion 8: minimal torsion is 2T on {quadratic} quadratic and -3S on \
         {cubic} cubic structures; split equivalence checked on {equal_multiplicity}"
    );
}

#[test]
fn criterion_09_structural_suite_everywhere() {
    let mut structures = Vec::new();
    for f in all_fixtures() {
        let (alg, phi) = load(&f).unwrap();
        structures.push((f.name.to_string(), alg, phi));
    }
    for (name, alg, phi) in fuzz_structures(1) {
        structures.push((name, alg, phi));
    }
    let mut items = 0usize;
    for (name, alg, phi) in &structures {
        let report = structural_suite(alg, phi).unwrap_or_else(|e| panic!("{name}: {e}"));
        for item in report.failures() {
            panic!("{name}: {} failed {}", item.name, item.detail);
        }
        items += report.items.len();
    }
    println!(
        "[PASS] criterion 9: structural battery green on {} structures ({items} checks)",
        structures.len()
    );
}

#[test]
fn criterion_09b_block_types_are_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    for f in all_fixtures() {
        let (_, phi) = load(&f).unwrap();
        let spec = analyze(&phi).unwrap();
        let base_types = block_decompose(&phi, &spec).type_multiset();
        for _ in 0..50 {
            let word = random_word(&mut rng, phi.n(), 6);
            let conj = onn_conjugate(&phi, &word).unwrap();
            let spec2 = analyze(&conj).unwrap();
            let types = block_decompose(&conj, &spec2).type_multiset();
            assert_eq!(types, base_types, "{}", f.name);
        }
    }
    println!("[PASS] criterion 9 (blocks): type multisets stable under 50 conjugations per fixture");
}

#[test]
fn criterion_10_differential_components() {
    // Minimal fixtures: components sum to d, each passes the vector
    // criterion, and brackets through each component land in the
    // eigenvalue-sum eigenspace. The non-minimal fixture fails the
    // criterion for some eigenvalue.
    let minimal_fixtures = ["heisenberg_a", "heisenberg_c", "nilpotent4", "resonance_1_3", "abelian"];
    for name in minimal_fixtures {
        let f = fixture(name).unwrap();
        let (alg, phi) = load(&f).unwrap();
        let spec = analyze(&phi).unwrap();
        let space = FormSpace::new(alg.dim());
        let d = ce_differential(&space, &alg);
        let lifted = lift(&space, &phi).unwrap();
        let comps = d_lambda_decomposition(&space, &lifted, &d, &spec);
        let mut total = polystruct::forms::FormOperator::zero(&space, polystruct::forms::Parity::Odd);
        for (_, op) in &comps {
            total = total.add(op);
        }
        assert_eq!(total.mat, d.mat, "{name}: components sum to the differential");
        for (lambda, ok) in d_lambda_vector_criterion(&space, &lifted, &comps, &spec) {
            assert!(ok, "{name}: criterion at {lambda}");
        }
        // memberships [[L_mu, L_nu]] through d_lambda land in L_{lambda+mu+nu}
        for (lambda, dl) in &comps {
            for (mu, basis_mu) in &spec.eigenbasis {
                for (nu, basis_nu) in &spec.eigenbasis {
                    let target = &(lambda + mu) + nu;
                    for x in basis_mu {
                        for y in basis_nu {
                            let op = derived_bracket(&space, dl, x, y);
                            let v = as_generalized_vector(&space, &op)
                                .expect("component brackets stay in the double");
                            let good = if spec.contains(&target) {
                                spec.component_outside(&v, &[target.clone()]).is_zero()
                            } else {
                                v.is_zero()
                            };
                            assert!(good, "{name}: membership at ({lambda}, {mu}, {nu})");
                        }
                    }
                }
            }
        }
    }

    // non-minimal: the criterion must fail somewhere
    let f = fixture("heisenberg_b").unwrap();
    let (alg, phi) = load(&f).unwrap();
    let spec = analyze(&phi).unwrap();
    let space = FormSpace::new(alg.dim());
    let d = ce_differential(&space, &alg);
    let lifted = lift(&space, &phi).unwrap();
    let comps = d_lambda_decomposition(&space, &lifted, &d, &spec);
    let crit = d_lambda_vector_criterion(&space, &lifted, &comps, &spec);
    assert!(
        crit.iter().any(|(_, ok)| !ok),
        "non-minimal structure must fail the component criterion"
    );

    // degree bookkeeping for the minimal non-resonant fixtures is part of
    // the structural battery; spot-check the grading degrees here on the
    // structure with spectrum {0, i, -i}.
    let f = fixture("heisenberg_c").unwrap();
    let (alg, phi) = load(&f).unwrap();
    let rep = structural_suite(&alg, &phi).unwrap();
    let degree_item = rep
        .items
        .iter()
        .find(|i| i.name.contains("component degrees"))
        .expect("degree check ran");
    assert!(degree_item.pass);
    println!("[PASS] criterion 10: differential component criteria and memberships");
}

#[test]
fn dorfman_equals_derived_bracket_everywhere() {
    // route-equivalence oracle for the bracket itself, on every fixture
    for f in all_fixtures() {
        let (alg, _) = load(&f).unwrap();
        let n = alg.dim();
        let space = FormSpace::new(n);
        let d = ce_differential(&space, &alg);
        for a in 0..2 * n {
            for b in 0..2 * n {
                let x = GenVector::frame(n, a);
                let y = GenVector::frame(n, b);
                let op = derived_bracket(&space, &d, &x, &y);
                let got = as_generalized_vector(&space, &op).unwrap();
                assert_eq!(got, dorfman(&alg, &x, &y), "{} ({a}, {b})", f.name);
            }
        }
    }
}

#[test]
fn unsupported_spectrum_is_rejected_not_approximated() {
    // a metallic-type lift leaves the Gaussian rationals and must be turned
    // away with the dedicated error
    let mut f = polystruct::scalars::Matrix::zeros(2, 2);
    f.set(0, 1, Scalar::one());
    f.set(1, 0, Scalar::one());
    f.set(1, 1, Scalar::one());
    let phi = polystruct::double::classical_lift(&f);
    let phi = Endo::new(phi.mat);
    match analyze(&phi) {
        Err(polystruct::Error::UnsupportedSpectrum(msg)) => {
            println!("[PASS] unsupported spectrum rejected: {msg}");
        }
        other => panic!("expected UnsupportedSpectrum, got {other:?}"),
    }
}

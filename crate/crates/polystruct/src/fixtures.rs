//! Built-in fixtures: the worked low-dimensional examples with their Jordan
//! frames and expected tensor values, the resonance family, and the seeded
//! fuzz generator used by the route-agreement suite.
//!
//! Each fixture records one global nonzero rational prefactor relating the
//! engine's tensors to the printed reference values (a consequence of the
//! half in the tautological pairing); every frame-value assertion multiplies
//! through by it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::double::{
    classical_lift, onn_conjugate, Endo, GenVector, InputDoc, LiePresentation, PairingMap,
};
use crate::error::Result;
use crate::scalars::{Matrix, Poly, Scalar};
use crate::spectral::{analyze, block_decompose, non_resonant, weak_nijenhuis_check, BlockType};
use crate::torsion::{higher, minimal_torsion, shifted_higher, Tensor3};

pub struct Fixture {
    pub name: &'static str,
    pub json: &'static str,
    /// Reference tensors equal `prefactor` times the engine's tensors.
    pub prefactor: Scalar,
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "heisenberg_a",
            json: include_str!("../fixtures/heisenberg_a.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "heisenberg_b",
            json: include_str!("../fixtures/heisenberg_b.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "heisenberg_c",
            json: include_str!("../fixtures/heisenberg_c.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "heisenberg_d",
            json: include_str!("../fixtures/heisenberg_d.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "nilpotent4",
            json: include_str!("../fixtures/nilpotent4.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "resonance_1_3",
            json: include_str!("../fixtures/resonance_1_3.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "resonance_1_2",
            json: include_str!("../fixtures/resonance_1_2.json"),
            prefactor: Scalar::from_int(2),
        },
        Fixture {
            name: "abelian",
            json: include_str!("../fixtures/abelian.json"),
            prefactor: Scalar::from_int(2),
        },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    all_fixtures().into_iter().find(|f| f.name == name)
}

pub fn load(f: &Fixture) -> Result<(LiePresentation, Endo)> {
    InputDoc::from_json(f.json)?.build()
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub fixture: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn gv(n: usize, spec: &[(usize, &str)]) -> GenVector {
    let mut coords = vec![Scalar::zero(); 2 * n];
    for (idx, val) in spec {
        coords[*idx] = Scalar::parse(val).unwrap();
    }
    GenVector::from_coords(&coords)
}

struct Recorder {
    fixture: String,
    items: Vec<Assertion>,
}

impl Recorder {
    fn new(fixture: &str) -> Self {
        Recorder {
            fixture: fixture.to_string(),
            items: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, pass: bool, detail: String) {
        self.items.push(Assertion {
            fixture: self.fixture.clone(),
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn check(&mut self, name: &str, pass: bool) {
        self.record(name, pass, String::new());
    }

    fn eq_tensor(&mut self, name: &str, got: &Tensor3, want: &Tensor3) {
        if got == want {
            self.record(name, true, String::new());
        } else {
            let diff = got.sub(want);
            let entry = diff.entries().next();
            let detail = match entry {
                Some(((a, b, c), v)) => {
                    format!(
                        "first differing entry ({a},{b},{c}): got {}, want {} (diff {v})",
                        got.get((*a, *b, *c)),
                        want.get((*a, *b, *c))
                    )
                }
                None => "tensors differ".into(),
            };
            self.record(name, false, detail);
        }
    }

    fn eq_scalar(&mut self, name: &str, got: &Scalar, want: &Scalar) {
        if got == want {
            self.record(name, true, String::new());
        } else {
            self.record(name, false, format!("got {got}, want {want}"));
        }
    }
}

/// Run the expected-value assertions of one named fixture against an algebra
/// and structure (normally the fixture's own, but fault-injection tests feed
/// perturbed ones).
pub fn assertions_for(
    name: &str,
    alg: &LiePresentation,
    phi: &Endo,
    prefactor: &Scalar,
) -> Vec<Assertion> {
    let mut rec = Recorder::new(name);
    let rho = prefactor;
    let spec = match analyze(phi) {
        Ok(spec) => spec,
        Err(e) => {
            rec.record("spectral analysis succeeds", false, e.to_string());
            return rec.items;
        }
    };
    let dec = block_decompose(phi, &spec);
    let routes = minimal_torsion(alg, phi, &spec.minpoly);
    rec.check(
        "three minimal-torsion routes agree",
        routes.multinomial == routes.expansion && routes.multinomial == routes.operator,
    );
    let torsion_orders: Vec<Tensor3> = (0..=8u32).map(|k| higher(alg, phi, k)).collect();
    let shifted_orders: Vec<Tensor3> = (0..=8u32).map(|k| shifted_higher(alg, phi, k)).collect();

    match name {
        "heisenberg_a" => {
            rec.check(
                "minimal polynomial is x^5",
                spec.minpoly == Poly::monomial(5, Scalar::one()),
            );
            rec.check(
                "blocks are D5+(0) (+) D1-(0)",
                dec.type_multiset()
                    == vec![
                        BlockType::OddZero { h: 0, eps: Some(-1) },
                        BlockType::OddZero { h: 2, eps: Some(1) },
                    ],
            );
            rec.check("courant tensor vanishes (minimal)", routes.is_minimal());
            for k in 2..=7usize {
                rec.check(
                    &format!("higher torsion of order {k} vanishes"),
                    torsion_orders[k].is_zero(),
                );
            }
            for k in 1..=7usize {
                rec.check(
                    &format!("shifted torsion of order {k} vanishes"),
                    shifted_orders[k].is_zero(),
                );
            }
            let b1 = gv(3, &[(3, "2")]);
            let b2 = gv(3, &[(4, "-2")]);
            let expected = Tensor3::simple(&b2, &b1, &b1)
                .scale(&Scalar::from_int(-1))
                .add(&Tensor3::simple(&b1, &b2, &b1));
            let got = torsion_orders[1].scale(&(rho * &Scalar::from_int(-8)));
            rec.eq_tensor(
                "-8 x order-one torsion equals -b2 b1 b1 + b1 b2 b1 in the Jordan frame",
                &got,
                &expected,
            );
        }
        "heisenberg_b" => {
            rec.check(
                "minimal polynomial is x^5",
                spec.minpoly == Poly::monomial(5, Scalar::one()),
            );
            rec.check(
                "blocks are D5+(0) (+) D1-(0)",
                dec.type_multiset()
                    == vec![
                        BlockType::OddZero { h: 0, eps: Some(-1) },
                        BlockType::OddZero { h: 2, eps: Some(1) },
                    ],
            );
            rec.check("courant tensor is nonzero (not minimal)", !routes.is_minimal());
            let b3 = gv(3, &[(2, "1"), (5, "1")]);
            let b4 = gv(3, &[(4, "1")]);
            let b5 = gv(3, &[(3, "1")]);
            let b1p = gv(3, &[(2, "1"), (5, "-1")]);
            rec.check(
                "courant tensor pairs nontrivially with b1' b5 b3",
                !routes
                    .tensor()
                    .inner(&Tensor3::simple(&b1p, &b5, &b3))
                    .is_zero(),
            );
            let got = &torsion_orders[4]
                .inner(&Tensor3::simple(&b5, &b4, &b5))
                * &(rho * &Scalar::from_int(2));
            rec.eq_scalar(
                "<2 x order-four torsion, b5 b4 b5> equals 10",
                &got,
                &Scalar::from_int(10),
            );
            rec.check(
                "shifted torsion of order 4 vanishes",
                shifted_orders[4].is_zero(),
            );
            for k in 5..=8usize {
                rec.check(
                    &format!("higher torsion of order {k} vanishes"),
                    torsion_orders[k].is_zero(),
                );
                rec.check(
                    &format!("shifted torsion of order {k} vanishes"),
                    shifted_orders[k].is_zero(),
                );
            }
        }
        "heisenberg_c" => {
            rec.check(
                "minimal polynomial is x(x^2+1)^2",
                spec.minpoly
                    == Poly::new(vec![
                        Scalar::zero(),
                        Scalar::one(),
                        Scalar::zero(),
                        Scalar::from_int(2),
                        Scalar::zero(),
                        Scalar::one(),
                    ]),
            );
            // D1^0(0,0) is by definition the orthogonal pair D1+(0) (+) D1-(0)
            rec.check(
                "blocks are D2+(i,-i) (+) D1^0(0,0)",
                dec.type_multiset()
                    == vec![
                        BlockType::OddZero { h: 0, eps: Some(-1) },
                        BlockType::OddZero { h: 0, eps: Some(1) },
                        BlockType::ImaginaryPair {
                            k: 2,
                            lambda0: Scalar::one(),
                            eps: Some(1),
                        },
                    ],
            );
            rec.check("courant tensor vanishes (minimal)", routes.is_minimal());
            for n in 1..=6usize {
                rec.check(
                    &format!("higher torsion of order {n} is nonzero"),
                    !torsion_orders[n].is_zero(),
                );
                rec.check(
                    &format!("shifted torsion of order {n} vanishes"),
                    shifted_orders[n].is_zero(),
                );
            }
            rec.check(
                "eigenspace brackets close (weak generalized Nijenhuis)",
                weak_nijenhuis_check(alg, &spec).holds,
            );
        }
        "heisenberg_d" => {
            rec.check("courant tensor is nonzero (not minimal)", !routes.is_minimal());
            for n in 1..=4usize {
                rec.check(
                    &format!("higher torsion of order {n} is nonzero"),
                    !torsion_orders[n].is_zero(),
                );
                rec.check(
                    &format!("shifted torsion of order {n} is nonzero"),
                    !shifted_orders[n].is_zero(),
                );
            }
        }
        "nilpotent4" => {
            rec.check(
                "minimal polynomial is x^4",
                spec.minpoly == Poly::monomial(4, Scalar::one()),
            );
            rec.check(
                "single block D4^0(0,0)",
                dec.type_multiset()
                    == vec![BlockType::RealPair {
                        k: 4,
                        lambda: Scalar::zero(),
                    }],
            );
            rec.check("courant tensor vanishes (minimal)", routes.is_minimal());
            let b11 = gv(4, &[(0, "1")]);
            let b21 = gv(4, &[(2, "1")]);
            let b12 = gv(4, &[(5, "1")]);
            let b22 = gv(4, &[(7, "-1")]);
            let b32 = gv(4, &[(6, "1")]);
            // The quoted six- and three-term reference expressions fail
            // against all three computation routes (and against the defining
            // recursion applied by hand to the bracket tensor); they are kept
            // verbatim for traceability, with the recomputed values asserted
            // right after.
            let t_expected = Tensor3::simple(&b12, &b32, &b12)
                .sub(&Tensor3::simple(&b12, &b21, &b32))
                .sub(&Tensor3::simple(&b12, &b22, &b22))
                .sub(&Tensor3::simple(&b32, &b12, &b12))
                .add(&Tensor3::simple(&b12, &b12, &b32))
                .add(&Tensor3::simple(&b22, &b12, &b22));
            rec.eq_tensor(
                "order-one torsion matches the quoted six-term frame expression",
                &torsion_orders[1].scale(rho),
                &t_expected,
            );
            let t_recomputed = Tensor3::simple(&b32, &b12, &b11)
                .scale(&Scalar::from_int(-1))
                .add(&Tensor3::simple(&b12, &b32, &b11))
                .add(&Tensor3::simple(&b32, &b11, &b12))
                .sub(&Tensor3::simple(&b12, &b11, &b32))
                .sub(&Tensor3::simple(&b12, &b21, &b22))
                .sub(&Tensor3::simple(&b11, &b32, &b12))
                .add(&Tensor3::simple(&b11, &b12, &b32))
                .add(&Tensor3::simple(&b21, &b12, &b22));
            rec.eq_tensor(
                "order-one torsion matches the recomputed eight-term frame expression",
                &torsion_orders[1].scale(rho),
                &t_recomputed,
            );
            let s_expected = Tensor3::simple(&b12, &b22, &b12)
                .sub(&Tensor3::simple(&b12, &b11, &b32))
                .sub(&Tensor3::simple(&b22, &b12, &b12));
            rec.eq_tensor(
                "order-one shifted torsion matches the quoted three-term frame expression",
                &shifted_orders[1].scale(rho),
                &s_expected,
            );
            let s_recomputed = Tensor3::simple(&b22, &b12, &b11)
                .sub(&Tensor3::simple(&b12, &b22, &b11))
                .sub(&Tensor3::simple(&b22, &b11, &b12))
                .add(&Tensor3::simple(&b12, &b11, &b22))
                .add(&Tensor3::simple(&b11, &b22, &b12))
                .sub(&Tensor3::simple(&b11, &b12, &b22));
            rec.eq_tensor(
                "order-one shifted torsion matches the recomputed six-term frame expression",
                &shifted_orders[1].scale(rho),
                &s_recomputed,
            );
            for n in 2..=6usize {
                rec.check(
                    &format!("higher torsion of order {n} vanishes"),
                    torsion_orders[n].is_zero(),
                );
                rec.check(
                    &format!("shifted torsion of order {n} vanishes"),
                    shifted_orders[n].is_zero(),
                );
            }
            // the order-two torsion is in fact the last nonzero one
            let t2 = Tensor3::simple(&b12, &b11, &b12)
                .scale(&Scalar::from_int(-2))
                .add(&Tensor3::simple(&b11, &b12, &b12).scale(&Scalar::from_int(2)));
            rec.eq_tensor(
                "order-two torsion matches the recomputed two-term frame expression",
                &torsion_orders[2].scale(rho),
                &t2,
            );
        }
        "resonance_1_3" | "resonance_1_2" => {
            let (lam, mu) = if name == "resonance_1_3" {
                (Scalar::one(), Scalar::from_int(3))
            } else {
                (Scalar::one(), Scalar::from_int(2))
            };
            // 4 lam (3 lam - mu) (lam - mu)^2
            let family_value = &(&(&Scalar::from_int(4) * &lam)
                * &(&(&Scalar::from_int(3) * &lam) - &mu))
                * &(&lam - &mu).pow(2);
            let got = &routes.tensor().eval_trilinear(
                &GenVector::basis_vec(4, 0),
                &GenVector::basis_vec(4, 1),
                &GenVector::basis_cov(4, 2),
            ) * rho;
            rec.eq_scalar(
                "courant tensor on (e1, e2, e^3) follows 4 lam (3 lam - mu)(lam - mu)^2",
                &got,
                &family_value,
            );
            if name == "resonance_1_3" {
                rec.check("structure is minimal", routes.is_minimal());
                rec.check("structure is resonant", !non_resonant(&spec));
                rec.check(
                    "semisimple part is not a weak generalized Nijenhuis operator",
                    !weak_nijenhuis_check(alg, &spec).holds,
                );
            } else {
                rec.check("structure is not minimal", !routes.is_minimal());
            }
        }
        "abelian" => {
            rec.check("courant tensor vanishes (minimal)", routes.is_minimal());
            rec.check(
                "eigenspace bracket closure holds vacuously",
                weak_nijenhuis_check(alg, &spec).holds,
            );
            for n in 0..=4usize {
                rec.check(
                    &format!("higher torsion of order {n} vanishes"),
                    torsion_orders[n].is_zero(),
                );
            }
        }
        other => {
            rec.record("known fixture", false, format!("no assertions for {other}"));
        }
    }
    rec.items
}

/// Run the whole built-in fixture suite (optionally filtered by substring).
pub fn run_fixture_suite(filter: Option<&str>) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for f in all_fixtures() {
        if let Some(pat) = filter {
            if !f.name.contains(pat) {
                continue;
            }
        }
        let (alg, phi) = load(&f)?;
        out.extend(assertions_for(f.name, &alg, &phi, &f.prefactor));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fuzz structures for the route-agreement suite
// ---------------------------------------------------------------------------

fn four_dim_nilpotent() -> LiePresentation {
    LiePresentation::new(
        "nilpotent4",
        4,
        &[(1, 2, 3, Scalar::one()), (2, 4, 1, Scalar::from_int(-1))],
    )
    .unwrap()
}

/// Block seeds, one per minimal polynomial of the fuzz family.
pub fn fuzz_seeds() -> Vec<(&'static str, LiePresentation, Endo)> {
    let heis = crate::double::heisenberg();
    let nil4 = four_dim_nilpotent();
    let mut out = Vec::new();

    // x^2: a shear by the 2-form dual to the bracket
    let mut m = Matrix::zeros(6, 6);
    m.set(4, 0, Scalar::one());
    m.set(3, 1, Scalar::from_int(-1));
    out.push(("x^2", heis.clone(), Endo::new(m)));

    // x^3 + x: classical lift of a rotation on a plane plus a kernel line
    let mut f = Matrix::zeros(3, 3);
    f.set(0, 1, Scalar::from_int(-1));
    f.set(1, 0, Scalar::one());
    out.push(("x^3+x", heis.clone(), classical_lift(&f)));

    // x^2 + 1: classical lift of a complex structure
    let mut j = Matrix::zeros(4, 4);
    j.set(0, 1, Scalar::from_int(-1));
    j.set(1, 0, Scalar::one());
    j.set(2, 3, Scalar::from_int(-1));
    j.set(3, 2, Scalar::one());
    out.push(("x^2+1", nil4.clone(), classical_lift(&j)));

    // (x^2+1)^2: classical lift of a complex structure with a nilpotent tail
    let mut f = Matrix::zeros(4, 4);
    f.set(0, 1, Scalar::from_int(-1));
    f.set(1, 0, Scalar::one());
    f.set(2, 3, Scalar::from_int(-1));
    f.set(3, 2, Scalar::one());
    f.set(0, 2, Scalar::one());
    f.set(1, 3, Scalar::one());
    out.push(("(x^2+1)^2", nil4.clone(), classical_lift(&f)));

    // x^2 (x^2+1): rotation lift on one plane, 2-form shear on the other
    let mut f = Matrix::zeros(4, 4);
    f.set(0, 1, Scalar::from_int(-1));
    f.set(1, 0, Scalar::one());
    let mut m = classical_lift(&f).mat;
    m.set(7, 2, Scalar::one());
    m.set(6, 3, Scalar::from_int(-1));
    out.push(("x^2(x^2+1)", nil4.clone(), Endo::new(m)));

    // x^4: the four-dimensional nilpotent example
    let f = fixture("nilpotent4").unwrap();
    let (_, phi) = load(&f).unwrap();
    out.push(("x^4", nil4, phi));

    // x^5: the degree-five nilpotent example
    let f = fixture("heisenberg_a").unwrap();
    let (_, phi) = load(&f).unwrap();
    out.push(("x^5", heis, phi));

    out
}

fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let num = rng.gen_range(-2i64..=2);
    let den = [1i64, 2, 3][rng.gen_range(0..3)];
    Scalar::rational(num, den)
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut b = Matrix::zeros(n, n);
    for _ in 0..rng.gen_range(1..=2) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = small_rational(rng);
        b.set(i, j, b.at(i, j) + &c);
        b.set(j, i, b.at(j, i) - &c);
    }
    b
}

/// A random word of pairing-preserving generators with small rational
/// parameters: 2-form shears, bivector shears, unipotent and diagonal frame
/// changes.
pub fn random_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Vec<PairingMap> {
    let len = rng.gen_range(1..=max_len);
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        match rng.gen_range(0..4) {
            0 => word.push(PairingMap::BTransform(random_skew(rng, n))),
            1 => word.push(PairingMap::BetaTransform(random_skew(rng, n))),
            2 => {
                let mut a = Matrix::identity(n);
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i != j {
                    a.set(i, j, small_rational(rng));
                }
                word.push(PairingMap::FrameChange(a));
            }
            _ => {
                let mut a = Matrix::identity(n);
                let i = rng.gen_range(0..n);
                let choices = [
                    Scalar::from_int(-1),
                    Scalar::from_int(2),
                    Scalar::rational(1, 2),
                    Scalar::rational(-3, 2),
                ];
                a.set(i, i, choices[rng.gen_range(0..choices.len())].clone());
                word.push(PairingMap::FrameChange(a));
            }
        }
    }
    word
}

/// Deterministic fuzz family: `per_seed` conjugates of every block seed.
pub fn fuzz_structures(per_seed: usize) -> Vec<(String, LiePresentation, Endo)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706f_6c79);
    let mut out = Vec::new();
    for (name, alg, phi) in fuzz_seeds() {
        for k in 0..per_seed {
            let word = random_word(&mut rng, alg.dim(), 6);
            let conj = onn_conjugate(&phi, &word).expect("generated words are invertible");
            out.push((format!("{name}#{k}"), alg.clone(), conj));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load_and_validate() {
        for f in all_fixtures() {
            let (alg, phi) = load(&f).expect(f.name);
            assert_eq!(2 * alg.dim(), phi.mat.rows(), "{}", f.name);
            phi.check_skew().expect(f.name);
        }
    }

    #[test]
    fn fuzz_seeds_have_the_advertised_minimal_polynomials() {
        fn s(t: &str) -> Scalar {
            Scalar::parse(t).unwrap()
        }
        let expected: Vec<Poly> = vec![
            Poly::monomial(2, Scalar::one()),
            Poly::new(vec![s("0"), s("1"), s("0"), s("1")]),
            Poly::new(vec![s("1"), s("0"), s("1")]),
            Poly::new(vec![s("1"), s("0"), s("2"), s("0"), s("1")]),
            Poly::new(vec![s("0"), s("0"), s("1"), s("0"), s("1")]),
            Poly::monomial(4, Scalar::one()),
            Poly::monomial(5, Scalar::one()),
        ];
        for ((name, _, phi), want) in fuzz_seeds().iter().zip(&expected) {
            phi.check_skew().expect(name);
            assert_eq!(&phi.min_poly(), want, "{name}");
        }
    }

    #[test]
    fn fuzz_words_preserve_skewness_and_min_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, _, phi) in fuzz_seeds() {
            let p = phi.min_poly();
            for _ in 0..3 {
                let word = random_word(&mut rng, phi.n(), 6);
                let conj = onn_conjugate(&phi, &word).unwrap();
                conj.check_skew().expect(name);
                assert_eq!(conj.min_poly(), p, "{name}");
            }
        }
    }

    #[test]
    fn fault_injection_changes_an_assertion() {
        // Scaling the degree-five structure keeps it skew but shifts the
        // printed frame values: a named assertion must fail with a diff.
        let f = fixture("heisenberg_a").unwrap();
        let (alg, phi) = load(&f).unwrap();
        let scaled = Endo::new(phi.mat.scale(&Scalar::from_int(2)));
        scaled.check_skew().unwrap();
        let results = assertions_for("heisenberg_a", &alg, &scaled, &f.prefactor);
        let failed: Vec<&Assertion> = results.iter().filter(|a| !a.pass).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().any(|a| !a.detail.is_empty()), "diff is reported");
        // the clean fixture passes the same assertions
        let clean = assertions_for("heisenberg_a", &alg, &phi, &f.prefactor);
        assert!(clean.iter().all(|a| a.pass));
    }
}

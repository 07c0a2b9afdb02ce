//! Command line front end: analyze an input document, print block or
//! differential-component tables, or run the built-in fixture suite.
//!
//! Exit codes: 0 on success, 2 on validation errors (malformed document,
//! Jacobi failure, non-skew endomorphism), 3 when the spectrum leaves the
//! Gaussian rationals.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polystruct::double::InputDoc;
use polystruct::error::Error;
use polystruct::fixtures;
use polystruct::forms::{
    ce_differential, d_lambda_decomposition, d_lambda_vector_criterion, grading_projectors, lift,
    operator_degrees, FormSpace,
};
use polystruct::report::analyze_document;
use polystruct::spectral::{analyze, block_decompose};

#[derive(Parser)]
#[command(
    name = "polystruct",
    version,
    about = "Exact analysis of generalized polynomial structures on Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on an input document and print a report.
    Analyze {
        file: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Highest torsion order to compute (default: degree of the minimal
        /// polynomial plus two).
        #[arg(long)]
        torsion_max: Option<u32>,
    },
    /// Run the built-in fixture suite and print one line per assertion.
    Fixtures {
        /// Only run fixtures whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Print the block decomposition of an input document.
    Blocks { file: PathBuf },
    /// Print the eigenvalue components of the differential and their
    /// generalized-vector criterion.
    Dlambda { file: PathBuf },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedSpectrum(_) => 3,
        _ => 2,
    }
}

fn load_doc(path: &PathBuf) -> Result<InputDoc, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    InputDoc::from_json(&text)
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            file,
            json,
            torsion_max,
        } => {
            let doc = load_doc(&file)?;
            let report = analyze_document(&doc, torsion_max)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
        }
        Command::Fixtures { filter } => {
            let results = fixtures::run_fixture_suite(filter.as_deref())?;
            let mut failed = 0usize;
            for a in &results {
                let status = if a.pass { "pass" } else { "FAIL" };
                if a.detail.is_empty() {
                    println!("[{status}] {}: {}", a.fixture, a.name);
                } else {
                    println!("[{status}] {}: {} ({})", a.fixture, a.name, a.detail);
                }
                if !a.pass {
                    failed += 1;
                }
            }
            println!("{} assertions, {} failed", results.len(), failed);
            if failed > 0 {
                return Err(Error::Invalid(format!(
                    "{failed} fixture assertions failed"
                )));
            }
        }
        Command::Blocks { file } => {
            let doc = load_doc(&file)?;
            let (_, phi) = doc.build()?;
            let spec = analyze(&phi)?;
            let dec = block_decompose(&phi, &spec);
            println!("minimal polynomial: {}", spec.minpoly);
            println!("decomposition: {dec}");
            for (i, b) in dec.blocks.iter().enumerate() {
                println!("block {}: {} (degree {})", i + 1, b.block_type, b.degree);
                if let Some((p, m)) = b.signature {
                    println!("  signature ({p}, {m})");
                }
                for chain in &b.chains {
                    let parts: Vec<String> =
                        chain.vecs.iter().rev().map(|v| v.to_string()).collect();
                    println!("  chain at {}: {} -> 0", chain.lambda, parts.join(" -> "));
                }
            }
        }
        Command::Dlambda { file } => {
            let doc = load_doc(&file)?;
            let (alg, phi) = doc.build()?;
            let spec = analyze(&phi)?;
            let space = FormSpace::new(alg.dim());
            let d = ce_differential(&space, &alg);
            let lifted = lift(&space, &phi)?;
            let comps = d_lambda_decomposition(&space, &lifted, &d, &spec);
            let crit = d_lambda_vector_criterion(&space, &lifted, &comps, &spec);
            println!("minimal polynomial: {}", spec.minpoly);
            let gradings: Vec<_> = spec
                .sigma_plus
                .iter()
                .map(|mu| {
                    let projs = grading_projectors(
                        &space,
                        &spec.eigenbasis[mu],
                        &spec.eigenbasis[&-mu],
                    )
                    .expect("eigenspace pairs are quasi split");
                    (mu.clone(), projs)
                })
                .collect();
            for ((lambda, op), (_, ok)) in comps.iter().zip(&crit) {
                let mut count = 0;
                for i in 0..op.mat.rows() {
                    for j in 0..op.mat.cols() {
                        if !op.mat.at(i, j).is_zero() {
                            count += 1;
                        }
                    }
                }
                println!(
                    "d_({lambda}): {count} nonzero matrix entries; vector criterion {}",
                    if *ok { "holds" } else { "fails" }
                );
                for (mu, projs) in &gradings {
                    let degs: Vec<String> =
                        operator_degrees(op, projs).iter().map(i64::to_string).collect();
                    println!(
                        "  degrees for the (L_{mu}, L_{}) grading: [{}]",
                        -mu,
                        degs.join(", ")
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

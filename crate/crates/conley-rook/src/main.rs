use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use conley_rook::dynamics::Model;
use conley_rook::pipeline::{self, Analysis, PipelineError};
use conley_rook::walls::RookField;

/// Combinatorial global-dynamics analysis of wall labelings and ramp systems.
#[derive(Debug, Parser)]
#[command(name = "conley-rook", version, about)]
struct Args {
    /// Input file (wall-labeling text, or ramp/network JSON).
    #[arg(long, required_unless_present = "fixtures")]
    input: Option<PathBuf>,

    /// Input kind: wall-labeling | ramp | network.
    #[arg(long, default_value = "wall-labeling")]
    kind: String,

    /// Model: f0 | f1 | f2 | f3.
    #[arg(long, default_value = "f3")]
    model: String,

    /// Comma-separated outputs:
    /// stg,grading,morse,conley,enumerate,h-report,geometry.
    #[arg(long, default_value = "morse,conley")]
    emit: String,

    /// Half-width family level for --emit h-report.
    #[arg(long, default_value_t = 1)]
    level: u8,

    /// Budget for connection-matrix enumeration (perturbation bits).
    #[arg(long, default_value_t = 20)]
    max_enum_bits: usize,

    /// Output path; stdout when omitted. Written atomically.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for the randomized part of the self-check.
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,

    /// Run the built-in worked examples and a short randomized self-check.
    #[arg(long, default_value_t = false)]
    fixtures: bool,
}

#[derive(Serialize)]
struct Document {
    version: u32,
    complex: ComplexInfo,
    results: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct ComplexInfo {
    extents: Vec<u32>,
    cells: usize,
    top_cells: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                PipelineError::TheoremViolation(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(args: &Args) -> Result<(), PipelineError> {
    if args.fixtures {
        return run_fixtures(args.seed);
    }
    let model = match args.model.as_str() {
        "f0" => Model::F0,
        "f1" => Model::F1,
        "f2" => Model::F2,
        "f3" => Model::F3,
        other => return Err(PipelineError::Input(format!("unknown model {other:?}"))),
    };
    let selections: Vec<&str> = args
        .emit
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    for s in &selections {
        if !matches!(
            *s,
            "stg" | "grading" | "morse" | "conley" | "enumerate" | "h-report" | "geometry"
        ) {
            return Err(PipelineError::Input(format!(
                "unknown emit selection {s:?}"
            )));
        }
    }
    if selections.contains(&"enumerate") && !selections.contains(&"conley") {
        return Err(PipelineError::Input(
            "emit selection 'enumerate' requires 'conley'".into(),
        ));
    }
    let needs_system = selections
        .iter()
        .any(|s| matches!(*s, "h-report" | "geometry"));
    if needs_system && args.kind == "wall-labeling" {
        return Err(PipelineError::Input(
            "h-report and geometry need a ramp or network input".into(),
        ));
    }
    let path = args.input.as_ref().expect("clap enforces --input");
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    let labeling = pipeline::load_labeling(&args.kind, &text)?;
    if model == Model::F3 && labeling.complex().dims() > 3 {
        return Err(PipelineError::Input(format!(
            "the cycle-resolving model is undefined above dimension 3 (N = {})",
            labeling.complex().dims()
        )));
    }
    let field = RookField::new(labeling)?;
    let analysis = Analysis::new(field, model)?;

    let mut results: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    for s in &selections {
        let value = match *s {
            "stg" => serde_json::to_value(analysis.stg_export()),
            "grading" => serde_json::to_value(analysis.grading_export()),
            "morse" => serde_json::to_value(analysis.morse_export()),
            "conley" => serde_json::to_value(analysis.conley_export()),
            "enumerate" => serde_json::to_value(analysis.enumerate_export(args.max_enum_bits)?),
            "h-report" => {
                let sys = pipeline::load_system(&text)?;
                serde_json::to_value(pipeline::h_report_export(&sys, args.level)?)
            }
            "geometry" => {
                let sys = pipeline::load_system(&text)?;
                serde_json::to_value(pipeline::geometry_export(&sys, analysis.field.complex()))
            }
            _ => unreachable!("selections validated above"),
        }
        .map_err(|e| PipelineError::Input(e.to_string()))?;
        results.insert((*s).to_string(), value);
    }

    let x = analysis.field.complex();
    let doc = Document {
        version: 1,
        complex: ComplexInfo {
            extents: x.extents().as_slice().to_vec(),
            cells: x.len(),
            top_cells: x.top_cells().len(),
        },
        results,
    };
    let rendered =
        serde_json::to_string_pretty(&doc).map_err(|e| PipelineError::Input(e.to_string()))?;
    match &args.out {
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, rendered.as_bytes())
                .and_then(|()| std::fs::rename(&tmp, path))
                .map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
        }
        None => println!("{rendered}"),
    }
    Ok(())
}

fn run_fixtures(seed: u64) -> Result<(), PipelineError> {
    use conley_rook::fixtures;
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "pass" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // worked example: mutual repression, three Morse nodes, unique matrix
    {
        let field = fixtures::running_rook_field();
        let analysis = Analysis::new(field, Model::F3)?;
        let export = analysis.morse_export();
        check(
            "running example: three Morse nodes",
            export.nodes.len() == 3 && export.edges == vec![[2, 0], [2, 1]],
        );
        let indices: Vec<Vec<usize>> = export
            .nodes
            .iter()
            .map(|n| n.conley_index.clone())
            .collect();
        check(
            "running example: indices",
            indices == vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 0]],
        );
        let matrices = analysis.enumerate_export(20)?;
        check(
            "running example: unique connection matrix",
            matrices.count == 1,
        );
    }

    // a short randomized property run
    {
        use conley_rook::blowup::{BlowupComplex, ExtendedGrading};
        use conley_rook::conley::{self as conley_mod, GradedComplex};
        use conley_rook::dynamics::{self, Grading};
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut all_ok = true;
        for _ in 0..10 {
            let field = fixtures::random_dissipative_field(&mut rng, 2, 2);
            let stg = dynamics::f3(&field).expect("dimension 2");
            if !stg.double_edges().is_empty() {
                all_ok = false;
            }
            let grading = Grading::new(&stg);
            let b = BlowupComplex::new(field.complex().clone());
            let ext = match ExtendedGrading::new(&b, &grading) {
                Ok(ext) => ext,
                Err(_) => {
                    all_ok = false;
                    continue;
                }
            };
            let gcc = GradedComplex::from_blowup(&b, &ext);
            let cc = conley_mod::reduce(&gcc);
            if !gcc.verify() || !cc.verify() || cc.euler_sum() != 1 {
                all_ok = false;
            }
            let _ = rng.gen::<u32>();
        }
        check("randomized self-check (10 labelings)", all_ok);
    }

    if failures == 0 {
        Ok(())
    } else {
        Err(PipelineError::Input(format!(
            "{failures} fixture(s) failed"
        )))
    }
}

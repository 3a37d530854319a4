use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use sphere_sne::bench::{run_grid_with_progress, BenchConfig};
use sphere_sne::eval::evaluate_embedding;
use sphere_sne::optimizer::run as vmf_run;
use sphere_sne::simgen::generate_dataset;
use sphere_sne::tsne::tsne_run;
use sphere_sne::{Dataset64, EmbedConfig64, EvalReport64, Geometry, Method, SimSpec64, TsneConfig64};

use crate::args::{BenchArgs, Cli, Command, EmbedArgs, EvalArgs, GenArgs, GeometryArg, MethodArg, PlotArgs};
use crate::error::{CliError, Result};
use crate::io::{read_points, sibling, write_loss_trace, write_points, write_text, PointFile};
use crate::manifest::{to_json, Manifest};
use crate::plot::render_svg;

/// Rows within this distance of unit norm count as spherical for `--geometry auto`.
const AUTO_SPHERE_TOLERANCE: f64 = 1e-6;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Embed(a) => embed(&a),
        Command::Eval(a) => eval(&a),
        Command::Plot(a) => plot(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<()> {
    write_text(&sibling(out, "manifest.json"), &to_json(manifest)?)
}

fn gen(a: &GenArgs) -> Result<()> {
    let started = Instant::now();
    let spec = SimSpec64 {
        d: a.dim,
        k: a.clusters,
        n_total: a.n,
        gen_kappa: a.kappa,
        min_separation: a.min_separation,
        seed: a.seed.seed,
    };
    let data = generate_dataset(&spec)?;
    let centres_path = sibling(&a.output, "centers.csv");
    write_points(&a.output, "x", data.points(), data.labels())?;
    if let Some(c) = data.centers() {
        write_points(&centres_path, "x", c, None)?;
    }
    let manifest = Manifest::new("gen", &spec, json!({ "data": spec.seed }))?
        .output(&a.output)
        .output(&centres_path)
        .timed(started, a.timing);
    write_manifest(&a.output, &manifest)
}

fn load_dataset(path: &Path) -> Result<Dataset64> {
    let PointFile { points, labels } = read_points(path)?;
    if points.rows() == 0 {
        return Err(CliError::validation(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset64::new(points, labels)?)
}

fn embed(a: &EmbedArgs) -> Result<()> {
    let started = Instant::now();
    let data = load_dataset(&a.input)?;
    let seed = a.seed.seed;
    let (run, config) = match a.method {
        MethodArg::Vmf => {
            let defaults = EmbedConfig64::default();
            let cfg = EmbedConfig64 {
                target_dim: a.dim.unwrap_or(defaults.target_dim),
                perplexity: a.perplexity,
                embed_kappa: a.embed_kappa,
                iterations: a.iterations,
                learning_rate: a.learning_rate.unwrap_or(defaults.learning_rate),
                seed,
                early_stop: a.early_stop,
            };
            (vmf_run(&data, &cfg)?, serde_json::to_value(&cfg))
        }
        MethodArg::Tsne => {
            if let Some(d) = a.dim.filter(|&d| d != TsneConfig64::TARGET_DIM) {
                return Err(CliError::validation(format!(
                    "t-SNE embeds into {} dimensions, not {d}",
                    TsneConfig64::TARGET_DIM
                )));
            }
            if a.early_stop {
                return Err(CliError::validation("--early-stop applies to the vmf method only"));
            }
            let defaults = TsneConfig64::default();
            let cfg = TsneConfig64 {
                perplexity: a.perplexity,
                iterations: a.iterations,
                learning_rate: a.learning_rate.unwrap_or(defaults.learning_rate),
                seed,
                ..defaults
            };
            (tsne_run(&data, &cfg)?, serde_json::to_value(&cfg))
        }
    };
    let config = config.map_err(|e| CliError::Numeric(e.to_string()))?;
    if !run.final_kl.is_finite() || run.loss_trace.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numeric("loss became non-finite during optimisation".into()));
    }

    let loss_path = sibling(&a.output, "loss.csv");
    write_points(&a.output, "y", &run.y, None)?;
    write_loss_trace(&loss_path, &run.loss_trace)?;
    let manifest = Manifest::new(
        "embed",
        json!({
            "method": run.method().name(),
            "settings": config,
            "iterations_run": run.iterations_run(),
            "initial_kl": run.initial_kl(),
            "final_kl": run.final_kl,
            "calibration_flagged": run.calibration_flagged,
        }),
        json!({ "embed": seed }),
    )?
    .input(&a.input)
    .output(&a.output)
    .output(&loss_path)
    .timed(started, a.timing);
    write_manifest(&a.output, &manifest)
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    #[serde(flatten)]
    report: &'a EvalReport64,
    manifest: Manifest,
}

fn eval(a: &EvalArgs) -> Result<()> {
    let started = Instant::now();
    let emb = read_points(&a.embedding)?;
    let data = read_points(&a.data)?;
    let labels = data
        .labels
        .ok_or_else(|| CliError::validation(format!("{}: no label column", a.data.display())))?;
    if emb.points.rows() != labels.len() {
        return Err(CliError::validation(format!(
            "embedding has {} rows but the data has {}",
            emb.points.rows(),
            labels.len()
        )));
    }
    let geometry = match a.geometry {
        GeometryArg::Spherical => Geometry::Spherical,
        GeometryArg::Planar => Geometry::Planar,
        GeometryArg::Auto if emb.points.non_unit_rows(AUTO_SPHERE_TOLERANCE).is_empty() => Geometry::Spherical,
        GeometryArg::Auto => Geometry::Planar,
    };
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let report = evaluate_embedding(&emb.points, geometry, &labels, k)?;
    let mut manifest = Manifest::new("eval", json!({ "geometry": geometry, "clusters": k }), json!({}))?
        .input(&a.embedding)
        .input(&a.data);
    if let Some(out) = &a.output {
        manifest = manifest.output(out);
    }
    let text = to_json(&EvalOutput { report: &report, manifest: manifest.timed(started, a.timing) })?;
    match &a.output {
        Some(out) => write_text(out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plot(a: &PlotArgs) -> Result<()> {
    let emb = read_points(&a.embedding)?;
    let labels = match &a.data {
        Some(path) => {
            let data = read_points(path)?;
            if data.points.rows() != emb.points.rows() {
                return Err(CliError::validation(format!(
                    "embedding has {} rows but the data has {}",
                    emb.points.rows(),
                    data.points.rows()
                )));
            }
            data.labels
        }
        None => emb.labels,
    };
    write_text(&a.output, &render_svg(&emb.points, labels.as_deref())?)
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    rows: &'a [sphere_sne::bench::BenchRow<f64>],
    manifest: Manifest,
}

fn bench(a: &BenchArgs) -> Result<()> {
    let started = Instant::now();
    let defaults = BenchConfig::<f64>::default();
    let config = BenchConfig {
        clusters: a.clusters.clone(),
        gen_kappas: a.kappas.clone(),
        methods: vec![Method::Tsne, Method::Vmf],
        replicates: a.replicates,
        dim: a.dim,
        n_total: a.n,
        vmf: EmbedConfig64 {
            perplexity: a.perplexity,
            embed_kappa: a.embed_kappa,
            iterations: a.iterations,
            learning_rate: a.learning_rate,
            ..defaults.vmf.clone()
        },
        tsne: TsneConfig64 { perplexity: a.perplexity, iterations: a.tsne_iterations, ..defaults.tsne.clone() },
        master_seed: a.seed.seed,
        ..defaults
    };
    if config.replicates == 0 || config.clusters.is_empty() || config.gen_kappas.is_empty() {
        return Err(CliError::validation("the grid needs at least one cluster count, concentration and replicate"));
    }
    let table = run_grid_with_progress(&config, |r| {
        eprintln!(
            "{:>3} clusters  kappa={:<6} {:<7}  entropy {:.4}  accuracy {:.4}",
            r.clusters,
            r.gen_kappa,
            r.method.name(),
            r.mean_entropy,
            r.accuracy
        );
    })?;
    let text = table.to_text();
    let text_path = sibling(&a.output, "txt");
    let manifest = Manifest::new("bench", &config, json!({ "master": config.master_seed }))?
        .output(&a.output)
        .output(&text_path)
        .timed(started, a.timing);
    write_text(&a.output, &to_json(&BenchOutput { rows: &table.rows, manifest })?)?;
    write_text(&text_path, &text)?;
    print!("{text}");
    Ok(())
}

//! Entropy/accuracy grid over cluster count × sampling concentration × method.
//!
//! For every (clusters, gen_kappa) pair and every replicate one dataset is
//! simulated and embedded by each method, so the methods are compared on
//! identical data. Seeds:
//! * data: `derive_seed(derive_seed(master, cell), replicate)` where `cell`
//!   indexes the (clusters, gen_kappa) pair in row-major order;
//! * embedding: `derive_seed(data_seed, 1 + method_index)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::eval::evaluate;
use crate::optimizer::{run_observed, EmbedConfig, Method};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::simgen::{generate_dataset, SimSpec};
use crate::tsne::{tsne_run_observed, TsneConfig};

/// vMF-SNE step size used by the default grid.
pub const BENCH_VMF_LEARNING_RATE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig<T> {
    pub clusters: Vec<usize>,
    pub gen_kappas: Vec<T>,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub dim: usize,
    pub n_total: usize,
    pub min_separation: T,
    /// vMF-SNE settings; `seed` is replaced per replicate.
    pub vmf: EmbedConfig<T>,
    /// t-SNE settings; `seed` is replaced per replicate.
    pub tsne: TsneConfig<T>,
    pub master_seed: u64,
}

impl<T: Scalar> Default for BenchConfig<T> {
    fn default() -> Self {
        Self {
            clusters: vec![4, 16],
            gen_kappas: [10.0, 20.0, 30.0, 40.0].iter().map(|&k| T::of(k)).collect(),
            methods: vec![Method::Tsne, Method::Vmf],
            replicates: 5,
            dim: 50,
            n_total: 800,
            min_separation: T::of(0.5),
            // η = 0.5 leaves the loss far from converged in 1000 iterations on
            // N = 800; the final KL stops improving from about 50 upwards.
            vmf: EmbedConfig { learning_rate: T::of(BENCH_VMF_LEARNING_RATE), ..EmbedConfig::default() },
            tsne: TsneConfig::default(),
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome<T> {
    pub replicate: usize,
    pub data_seed: u64,
    pub embed_seed: u64,
    pub accuracy: T,
    pub mean_entropy: T,
    pub initial_kl: T,
    pub final_kl: T,
    /// Every recorded KL value was finite.
    pub finite_trace: bool,
    /// Largest `|‖y_i‖ − 1|` seen after any iteration (spherical runs only).
    pub max_norm_deviation: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow<T> {
    pub clusters: usize,
    pub gen_kappa: T,
    pub method: Method,
    /// Means over replicates.
    pub mean_entropy: T,
    pub accuracy: T,
    pub median_accuracy: T,
    pub seeds: Vec<SeedOutcome<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable<T> {
    pub rows: Vec<BenchRow<T>>,
}

fn median<T: Scalar>(values: &[T]) -> T {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite accuracies"));
    let n = v.len();
    if n == 0 {
        T::nan()
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::of(2.0)
    }
}

fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of_usize(values.len().max(1))
}

/// Runs the full grid, calling `progress` as each row completes.
pub fn run_grid_with_progress<T: Scalar, F>(config: &BenchConfig<T>, mut progress: F) -> Result<BenchTable<T>>
where
    F: FnMut(&BenchRow<T>),
{
    let mut rows = Vec::new();
    for (ci, &k) in config.clusters.iter().enumerate() {
        for (ki, &gen_kappa) in config.gen_kappas.iter().enumerate() {
            let cell = (ci * config.gen_kappas.len() + ki) as u64;
            let mut outcomes: Vec<Vec<SeedOutcome<T>>> = vec![Vec::new(); config.methods.len()];
            for rep in 0..config.replicates {
                let data_seed = derive_seed(derive_seed(config.master_seed, cell), rep as u64);
                let spec = SimSpec {
                    d: config.dim,
                    k,
                    n_total: config.n_total,
                    gen_kappa,
                    min_separation: config.min_separation,
                    seed: data_seed,
                };
                let data = generate_dataset(&spec)?;
                for (mi, &method) in config.methods.iter().enumerate() {
                    let embed_seed = derive_seed(data_seed, 1 + mi as u64);
                    let mut finite = true;
                    let mut worst = T::zero();
                    let run = match method {
                        Method::Vmf => {
                            let cfg = EmbedConfig { seed: embed_seed, ..config.vmf.clone() };
                            run_observed(&data, &cfg, |_, y, kl| {
                                finite &= kl.is_finite();
                                worst = worst.max(y.max_norm_deviation());
                            })?
                        }
                        Method::Tsne => {
                            let cfg = TsneConfig { seed: embed_seed, ..config.tsne.clone() };
                            tsne_run_observed(&data, &cfg, |_, _, kl| finite &= kl.is_finite())?
                        }
                    };
                    let report = evaluate(&run, &data)?;
                    outcomes[mi].push(SeedOutcome {
                        replicate: rep,
                        data_seed,
                        embed_seed,
                        accuracy: report.accuracy,
                        mean_entropy: report.mean_entropy,
                        initial_kl: run.initial_kl(),
                        final_kl: run.final_kl,
                        finite_trace: finite && run.final_kl.is_finite(),
                        max_norm_deviation: (method == Method::Vmf).then_some(worst),
                    });
                }
            }
            for (mi, &method) in config.methods.iter().enumerate() {
                let seeds = std::mem::take(&mut outcomes[mi]);
                let acc: Vec<T> = seeds.iter().map(|s| s.accuracy).collect();
                let ent: Vec<T> = seeds.iter().map(|s| s.mean_entropy).collect();
                let row = BenchRow {
                    clusters: k,
                    gen_kappa,
                    method,
                    mean_entropy: mean(&ent),
                    accuracy: mean(&acc),
                    median_accuracy: median(&acc),
                    seeds,
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(BenchTable { rows })
}

pub fn run_grid<T: Scalar>(config: &BenchConfig<T>) -> Result<BenchTable<T>> {
    run_grid_with_progress(config, |_| {})
}

impl<T: Scalar> BenchTable<T> {
    pub fn find(&self, clusters: usize, gen_kappa: T, method: Method) -> Option<&BenchRow<T>> {
        self.rows.iter().find(|r| r.clusters == clusters && r.gen_kappa == gen_kappa && r.method == method)
    }

    /// Aligned text table: one block per cluster count, one line per
    /// concentration, entropy and accuracy side by side for each method.
    pub fn to_text(&self) -> String {
        let mut methods: Vec<Method> = Vec::new();
        let mut clusters: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
            if !clusters.contains(&r.clusters) {
                clusters.push(r.clusters);
            }
        }
        let label = |m: Method| match m {
            Method::Tsne => "t-SNE",
            Method::Vmf => "vMF-SNE",
        };
        let mut out = String::new();
        for &k in &clusters {
            let _ = write!(out, "{:<12}", format!("{k} clusters"));
            for m in &methods {
                let _ = write!(out, "{:>12}", format!("H {}", label(*m)));
            }
            for m in &methods {
                let _ = write!(out, "{:>14}", format!("Acc {}", label(*m)));
            }
            out.push('\n');
            let mut kappas: Vec<T> = Vec::new();
            for r in self.rows.iter().filter(|r| r.clusters == k) {
                if !kappas.contains(&r.gen_kappa) {
                    kappas.push(r.gen_kappa);
                }
            }
            for &kappa in &kappas {
                let _ = write!(out, "{:<12}", format!("kappa={kappa}"));
                for &m in &methods {
                    match self.find(k, kappa, m) {
                        Some(r) => {
                            let _ = write!(out, "{:>12.4}", r.mean_entropy.as_f64());
                        }
                        None => {
                            let _ = write!(out, "{:>12}", "-");
                        }
                    }
                }
                for &m in &methods {
                    match self.find(k, kappa, m) {
                        Some(r) => {
                            let _ = write!(out, "{:>13.2}%", 100.0 * r.accuracy.as_f64());
                        }
                        None => {
                            let _ = write!(out, "{:>14}", "-");
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use grasscode::basis::weyl_heisenberg_basis;
use grasscode::designer::{optimize_mapping_x, DesignCase, DesignConfig, DesignCriterion};
use grasscode::diametral::{find_diametral_sets, max_diametral_set};
use grasscode::fileio::{sim_result_csv, trace_csv, ConstellationFile, MetricsReport};
use grasscode::sim::{random_grassmannian_baseline, run_monte_carlo, ChannelConfig, DetectorKind};
use grasscode::Constellation64;
use std::path::PathBuf;
use std::process::ExitCode;

/// Flag-level validation failure: reported like a clap error, exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Structured Grassmannian constellations: design, metrics, simulation.
#[derive(Parser)]
#[command(name = "grasscode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Dp,
    Ub,
}

impl From<CriterionArg> for DesignCriterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Dp => DesignCriterion::Dp,
            CriterionArg::Ub => DesignCriterion::Ub,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Fast,
    Naive,
}

#[derive(Subcommand)]
enum Command {
    /// Design a constellation on Gr(2M, M) and write it to a file.
    Design {
        /// Number of transmit antennas M (block length is T = 2M).
        #[arg(short, long)]
        m: usize,
        /// Constellation size L (power of two, 2 <= L <= 4M^2).
        #[arg(short, long)]
        l: usize,
        /// Mapping-parameter objective.
        #[arg(long, value_enum, default_value = "dp")]
        criterion: CriterionArg,
        /// Receive antennas assumed by the union-bound objective.
        #[arg(long, default_value_t = 2)]
        n_ub: usize,
        /// Grid points for the mapping-parameter sweep.
        #[arg(long, default_value_t = 5000)]
        grid: usize,
        /// Output constellation file (JSON).
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the x-sweep trace as CSV (tuned cases only).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Report minimum distances, diversity product and union bound of a
    /// constellation file.
    Metrics {
        /// Constellation file (JSON).
        input: PathBuf,
        /// Receive antennas for the union bound.
        #[arg(long, default_value_t = 2)]
        n_ub: usize,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo SER/BER over the Rayleigh block-fading channel.
    Simulate {
        /// Constellation file (JSON); omit to use a random-subspace baseline.
        #[arg(long, conflicts_with = "baseline")]
        input: Option<PathBuf>,
        /// Use a seeded random Grassmannian baseline T,M,L instead of a file.
        #[arg(long, value_delimiter = ',')]
        baseline: Option<Vec<usize>>,
        /// Receive antennas N.
        #[arg(short, long)]
        n: usize,
        /// SNR points in dB: comma-separated values and/or a:b:step ranges.
        #[arg(long, alias = "snr-db", value_delimiter = ',', required = true)]
        snr: Vec<String>,
        /// Trial cap per SNR point.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Early-stop after this many symbol-error events.
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "fast")]
        detector: DetectorArg,
        /// Write the result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the result as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the simulated codebook as a constellation file.
        #[arg(long)]
        save_constellation: Option<PathBuf>,
    },
    /// Inspect diametral sets of the Weyl-Heisenberg family.
    Diametral {
        #[arg(short, long)]
        m: usize,
        /// Request sets of this signed size instead of the maximum.
        #[arg(long)]
        size: Option<usize>,
        /// How many sets (1 or 2).
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Require the requested sets to be disjoint.
        #[arg(long)]
        disjoint: bool,
    },
    /// Print the tangent basis directions for a given M.
    BasisDump {
        #[arg(short, long)]
        m: usize,
    },
    /// Re-derive published reference numbers and check them.
    Reproduce {
        /// Distance table: 3 (M = 2 sweep) or 4 (maximal-size designs).
        #[arg(long, conflicts_with = "figure")]
        table: Option<u32>,
        /// Figure: 2 (mapping-parameter sweep for M = 2, L = 16).
        #[arg(long)]
        figure: Option<u32>,
        /// Optional CSV output for figure data.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GRASSCODE_THREADS") {
        let threads: usize = v
            .parse()
            .with_context(|| format!("GRASSCODE_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("rayon thread pool")?;
    }
    Ok(())
}

fn load_constellation(path: &PathBuf) -> Result<Constellation64> {
    let file = ConstellationFile::read_from(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(file.to_constellation()?)
}

/// Pair-node families of the tuned cases, reconstructed from provenance.
fn tuned_families(c: &Constellation64) -> Option<(Vec<usize>, Vec<usize>)> {
    let prov = c.provenance.as_ref()?;
    match prov.case {
        DesignCase::II | DesignCase::IV => {
            let nodes = &prov.pair_nodes;
            let half = nodes.len() / 2;
            Some((nodes[..half].to_vec(), nodes[half..].to_vec()))
        }
        _ => None,
    }
}

fn cmd_design(
    m: usize,
    l: usize,
    criterion: CriterionArg,
    n_ub: usize,
    grid: usize,
    out: PathBuf,
    trace: Option<PathBuf>,
) -> Result<()> {
    let max = 4 * m * m;
    if m == 0 || l < 2 || !l.is_power_of_two() || l > max {
        return Err(usage(format!(
            "invalid constellation size: L must be a power of two with 2 <= L <= 4M^2 = {max}, got L = {l}"
        )));
    }
    let cfg = DesignConfig {
        m,
        l,
        criterion: criterion.into(),
        n_for_ub: n_ub,
        x_grid_size: grid,
    };
    let c = grasscode::design::<f64>(&cfg)?;
    let prov = c.provenance.as_ref().expect("designed constellations carry provenance");
    let report = MetricsReport::compute(&c, n_ub);
    println!(
        "designed M = {m}, T = {}, L = {l} (case {}, rate {:.3} bpcu)",
        2 * m,
        prov.case,
        c.rate()
    );
    if let Some(x) = prov.x {
        println!("mapping parameter x* = {x:.6}");
    }
    println!("{report}");
    if let Some(trace_path) = trace {
        match tuned_families(&c) {
            Some((g1, g2)) => {
                let (_, tr) =
                    optimize_mapping_x::<f64>(m, &g1, &g2, cfg.criterion, n_ub, grid);
                std::fs::write(&trace_path, trace_csv(&tr))?;
                println!("trace written to {}", trace_path.display());
            }
            None => bail!("case {} has no mapping parameter; nothing to trace", prov.case),
        }
    }
    ConstellationFile::from_constellation(&c).write_to(&out)?;
    println!("constellation written to {}", out.display());
    Ok(())
}

fn cmd_metrics(input: PathBuf, n_ub: usize, json: bool) -> Result<()> {
    let c = load_constellation(&input)?;
    let report = MetricsReport::compute(&c, n_ub);
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(())
}

/// Expands "a:b:step" ranges (inclusive of b up to rounding) and plain values.
fn parse_snr_list(items: &[String]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in items {
        if let Some((a, rest)) = item.split_once(':') {
            let (b, step) = rest
                .split_once(':')
                .ok_or_else(|| usage(format!("SNR range {item:?} must be a:b:step")))?;
            let (a, b, step): (f64, f64, f64) = (
                a.parse().map_err(|_| usage(format!("bad SNR range start {a:?}")))?,
                b.parse().map_err(|_| usage(format!("bad SNR range end {b:?}")))?,
                step.parse().map_err(|_| usage(format!("bad SNR range step {step:?}")))?,
            );
            if step <= 0.0 || b < a {
                return Err(usage(format!("SNR range {item:?} must ascend with positive step")));
            }
            let mut v = a;
            while v <= b + 1e-9 {
                out.push(v);
                v += step;
            }
        } else {
            out.push(item.parse().map_err(|_| usage(format!("bad SNR value {item:?}")))?);
        }
    }
    if out.is_empty() {
        return Err(usage("no SNR points given"));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    input: Option<PathBuf>,
    baseline: Option<Vec<usize>>,
    n: usize,
    snr: Vec<String>,
    trials: u64,
    min_errors: u64,
    seed: u64,
    detector: DetectorArg,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    save_constellation: Option<PathBuf>,
) -> Result<()> {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let snr_db = parse_snr_list(&snr)?;
    let c = match (&input, &baseline) {
        (Some(path), None) => load_constellation(path)?,
        (None, Some(tml)) => {
            let [t, m, l] = tml[..] else {
                return Err(usage("--baseline expects T,M,L"));
            };
            random_grassmannian_baseline(t, m, l, seed)
        }
        _ => bail!("provide exactly one of --input or --baseline"),
    };
    let kind = match detector {
        DetectorArg::Fast => DetectorKind::Fast,
        DetectorArg::Naive => DetectorKind::Naive,
    };
    let mut cfg = ChannelConfig::new(n, snr_db, trials, seed);
    cfg.min_error_events = min_errors;
    let result = run_monte_carlo(&cfg, &c, kind)?;
    println!("snr_db      trials   sym_err   ser          ber");
    for p in &result.points {
        println!(
            "{:>6.2} {:>11} {:>9} {:>12.6e} {:>12.6e}",
            p.snr_db, p.trials, p.sym_errors, p.ser, p.ber
        );
    }
    println!("wall clock: {:.2} s", result.wall_clock_secs);
    if let Some(path) = out {
        std::fs::write(&path, serde_json::to_string_pretty(&result)?)?;
        println!("result written to {}", path.display());
    }
    if let Some(path) = csv {
        std::fs::write(&path, sim_result_csv(&result))?;
        println!("csv written to {}", path.display());
    }
    if let Some(path) = save_constellation {
        ConstellationFile::from_constellation(&c).write_to(&path)?;
        println!("constellation written to {}", path.display());
    }
    Ok(())
}

fn cmd_diametral(m: usize, size: Option<usize>, count: usize, disjoint: bool) -> Result<()> {
    let basis = weyl_heisenberg_basis::<f64>(m);
    let sets = match size {
        None => {
            let (set, d) = max_diametral_set::<f64>(m);
            println!("maximum diametral set size D = {d} for M = {m}");
            vec![set]
        }
        Some(size) => find_diametral_sets::<f64>(m, size, count, disjoint)?,
    };
    for (i, set) in sets.iter().enumerate() {
        println!("set {} ({} signed vectors):", i + 1, set.len());
        for node in set.nodes() {
            let (a, b, phase) = basis[node].label();
            let phase = match phase {
                grasscode::basis::Phase::One => "1",
                grasscode::basis::Phase::I => "i",
            };
            println!("  ±{node:>3}  (a = {a}, b = {b}, phase = {phase})");
        }
    }
    Ok(())
}

fn cmd_basis_dump(m: usize) -> Result<()> {
    let basis = weyl_heisenberg_basis::<f64>(m);
    println!("{} tangent directions for M = {m} ({})", basis.len(), grasscode::basis::BASIS_ORDERING_ID);
    for bv in &basis {
        let (a, b, phase) = bv.label();
        let phase = match phase {
            grasscode::basis::Phase::One => "1",
            grasscode::basis::Phase::I => "i",
        };
        println!("k = {:>3}: a = {a}, b = {b}, phase = {phase}", bv.index());
        let dt = bv.delta_tilde();
        for i in 0..m {
            let row: Vec<String> = (0..m)
                .map(|j| format!("{:+.4}{:+.4}i", dt[(i, j)].re, dt[(i, j)].im))
                .collect();
            println!("    [{}]", row.join(", "));
        }
    }
    Ok(())
}

struct Expected {
    m: usize,
    l: usize,
    d_g: Option<f64>,
    d_c: f64,
    dp: f64,
}

fn check_rows(rows: &[Expected], tol: f64) -> Result<()> {
    let mut failures = 0;
    for row in rows {
        let c = grasscode::design::<f64>(&DesignConfig::new(row.m, row.l))?;
        let r = MetricsReport::compute(&c, 2);
        let mut ok = (r.d_c_min - row.d_c).abs() <= tol && (r.dp_min - row.dp).abs() <= tol;
        if let Some(d_g) = row.d_g {
            ok &= (r.d_g_min - d_g).abs() <= tol;
        }
        let verdict = if ok { "ok" } else { "MISMATCH" };
        if !ok {
            failures += 1;
        }
        println!(
            "M = {}, L = {:>3}: d_g = {:.4}, d_c = {:.4}, DP = {:.4}   [{verdict}]",
            row.m, row.l, r.d_g_min, r.d_c_min, r.dp_min
        );
    }
    if failures > 0 {
        bail!("{failures} row(s) deviate from the reference values");
    }
    Ok(())
}

fn cmd_reproduce(table: Option<u32>, figure: Option<u32>, out: Option<PathBuf>) -> Result<()> {
    match (table, figure) {
        (Some(3), None) => {
            let sqrt2 = std::f64::consts::SQRT_2;
            check_rows(
                &[
                    Expected { m: 2, l: 2, d_g: Some(sqrt2 * std::f64::consts::FRAC_PI_2), d_c: sqrt2, dp: 1.0 },
                    Expected { m: 2, l: 4, d_g: Some(1.3508), d_c: 1.1546, dp: 0.4442 },
                    Expected { m: 2, l: 8, d_g: Some(1.1107), d_c: 1.0, dp: 0.25 },
                    Expected { m: 2, l: 16, d_g: Some(0.9888), d_c: 0.9102, dp: 0.1715 },
                ],
                1e-3,
            )
        }
        (Some(4), None) => check_rows(
            &[
                Expected { m: 1, l: 4, d_g: None, d_c: 0.8164, dp: 0.6665 },
                Expected { m: 2, l: 16, d_g: None, d_c: 0.9102, dp: 0.1715 },
                Expected { m: 4, l: 64, d_g: None, d_c: 1.4142, dp: 0.0 },
            ],
            1e-3,
        ),
        (None, Some(2)) => {
            let mut combined = String::from("l,x,d_g,d_c,dp,ub\n");
            for (l, peak_dp) in [(4usize, 0.4442), (16, 0.1715)] {
                let cfg = DesignConfig::new(2, l);
                let c = grasscode::design::<f64>(&cfg)?;
                let (g1, g2) =
                    tuned_families(&c).ok_or_else(|| anyhow!("expected a tuned case"))?;
                let (x, tr) =
                    optimize_mapping_x::<f64>(2, &g1, &g2, cfg.criterion, 2, cfg.x_grid_size);
                let best = tr
                    .iter()
                    .max_by(|a, b| a.dp.partial_cmp(&b.dp).unwrap())
                    .unwrap();
                println!(
                    "L = {l:>2}: sweep of {} grid points, best x = {x:.6}, DP = {:.4}",
                    tr.len(),
                    best.dp
                );
                if (best.dp - peak_dp).abs() > 1e-3 {
                    bail!("L = {l}: peak DP {:.4} deviates from the reference {peak_dp}", best.dp);
                }
                for p in &trace_csv(&tr).lines().skip(1).collect::<Vec<_>>() {
                    combined.push_str(&format!("{l},{p}\n"));
                }
            }
            println!("both peaks match the reference values   [ok]");
            if let Some(path) = out {
                std::fs::write(&path, combined)?;
                println!("figure data written to {}", path.display());
            }
            Ok(())
        }
        _ => bail!("specify --table 3, --table 4, or --figure 2"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = init_threads().and_then(|()| match cli.command {
        Command::Design { m, l, criterion, n_ub, grid, out, trace } => {
            cmd_design(m, l, criterion, n_ub, grid, out, trace)
        }
        Command::Metrics { input, n_ub, json } => cmd_metrics(input, n_ub, json),
        Command::Simulate {
            input,
            baseline,
            n,
            snr,
            trials,
            min_errors,
            seed,
            detector,
            out,
            csv,
            save_constellation,
        } => cmd_simulate(
            input,
            baseline,
            n,
            snr,
            trials,
            min_errors,
            seed,
            detector,
            out,
            csv,
            save_constellation,
        ),
        Command::Diametral { m, size, count, disjoint } => cmd_diametral(m, size, count, disjoint),
        Command::BasisDump { m } => cmd_basis_dump(m),
        Command::Reproduce { table, figure, out } => cmd_reproduce(table, figure, out),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Command-line driver for walk validation, canonicalization and the
//! convergence studies.
//!
//! Exit codes: 0 success, 1 failed physical check (bound violated,
//! unitarity failed, ...), 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;

use weylwalk::continuum::{self, BMatrices};
use weylwalk::walk::{LatticeScale, WalkSpec};
use weylwalk::{canonical, evolve, io, packet, zoo};

#[derive(Parser)]
#[command(name = "weylwalk", version, about = "causal lattice walks and their continuum limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the per-displacement unitarity conditions of a walk file.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split U_D = W Σ A′_q S_q and report W, the massless flag and M.
    Decompose {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Canonicalize a 2-level continuum Hamiltonian to γ-weighted Weyl form.
    Canonicalize {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate tr(H(p)²) − k|p|² at one momentum.
    TraceTest {
        file: PathBuf,
        /// Momentum, comma-separated (e.g. 0,0,1).
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Eigenphase curves of U(p) against the continuum eigenvalues along a
    /// momentum segment from −p to +p.
    Dispersion {
        file: PathBuf,
        /// Endpoint of the segment; defaults to the zone edge along axis 0.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured one-step norm against the analytic massless bound.
    BoundCheck {
        file: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-log fit of the one-step norm over a schedule of lattice spacings.
    ScalingStudy {
        /// Walk file; its coins are reused at every scale. For walks whose
        /// coins depend on dt, use --name to rebuild from the zoo instead.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        name: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        lambda: f64,
        /// Comma-separated descending lattice spacings.
        #[arg(long)]
        a_schedule: String,
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gaussian wave-packet evolution under the walk and its continuum
    /// Hamiltonian.
    Evolve {
        file: PathBuf,
        /// Mean momentum, comma-separated.
        #[arg(long)]
        p0: String,
        /// Real-space packet width σ_x.
        #[arg(long, default_value_t = 6.0)]
        sigma: f64,
        #[arg(long, default_value_t = 16)]
        steps: u64,
        /// Grid sites per dimension.
        #[arg(long, default_value_t = 256)]
        sites: usize,
        #[arg(long)]
        lambda: Option<f64>,
        /// Internal state as flattened re,im pairs; defaults to the +1
        /// eigenvector of σ·p̂₀ for k = 2.
        #[arg(long)]
        spin: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Named walk constructions.
    Zoo {
        #[command(subcommand)]
        command: ZooCommand,
    },
}

#[derive(Subcommand)]
enum ZooCommand {
    /// List available constructions.
    List,
    /// Write a construction to the walk file format.
    Export {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_PHYSICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("WEYLWALK_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn load_walk(path: &PathBuf) -> Result<WalkSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    io::parse_walk(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_bm(spec: &WalkSpec, tol: f64) -> Result<BMatrices, String> {
    let decomp = spec.mass_decompose(tol).map_err(|e| e.to_string())?;
    Ok(continuum::b_matrices(&decomp, spec))
}

fn parse_vector(text: &str, d: usize) -> Result<Vec<f64>, String> {
    let v: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| format!("invalid momentum {text:?}: {e}"))?;
    if v.len() != d {
        return Err(format!("momentum {text:?} has {} components, walk has d = {d}", v.len()));
    }
    Ok(v)
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { file, tol, out } => {
            let spec = load_walk(&file)?;
            let report = spec.validate_unitarity(tol);
            println!("completeness residual: {:.3e}", report.completeness);
            for (q, r) in &report.residuals {
                println!("displacement {q:?}: {r:.3e}");
            }
            if let Some(path) = &out {
                write_out(&Some(path.clone()), &io::validation_csv(&report))?;
            }
            if report.passes() {
                println!("PASS (max residual {:.3e} <= tol {tol:.3e})", report.max_residual());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL (max residual {:.3e} > tol {tol:.3e})", report.max_residual());
                Ok(ExitCode::from(EXIT_PHYSICAL))
            }
        }
        Command::Decompose { file, tol } => {
            let spec = load_walk(&file)?;
            let decomp = spec.mass_decompose(tol).map_err(|e| e.to_string())?;
            println!("massless: {}", decomp.massless);
            println!("W =");
            print_matrix(&decomp.w);
            if let Some(m) = &decomp.mass {
                println!("M =");
                print_matrix(m);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Canonicalize { file, tol, out } => {
            let spec = load_walk(&file)?;
            let bm = load_bm(&spec, tol)?;
            let pd = canonical::pauli_decompose(&bm).map_err(|e| e.to_string())?;
            let cf = canonical::canonicalize(&pd, tol);
            let ratio = spec.scale().ratio();
            println!(
                "gamma = ({:.12}, {:.12}, {:.12})  [a/dt = {ratio}]",
                cf.gamma[0], cf.gamma[1], cf.gamma[2]
            );
            println!("handedness = {}", cf.handedness);
            println!("beta = {:?}", cf.beta);
            println!("effective_dim = {}", cf.effective_dim);
            if let Some(path) = &out {
                write_out(&Some(path.clone()), &io::canonical_csv(&cf))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::TraceTest { file, p, tol } => {
            let spec = load_walk(&file)?;
            if spec.dim() != 3 {
                return Err(format!("trace test needs d = 3, walk has d = {}", spec.dim()));
            }
            let bm = load_bm(&spec, tol)?;
            let v = parse_vector(&p, 3)?;
            let value = canonical::lorentz_trace_test(&bm, &[v[0], v[1], v[2]]);
            println!("{value}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Dispersion { file, p, grid, tol, out } => {
            let spec = load_walk(&file)?;
            let bm = load_bm(&spec, tol)?;
            let d = spec.dim();
            let end = match p {
                Some(text) => parse_vector(&text, d)?,
                None => {
                    let mut v = vec![0.0; d];
                    v[0] = std::f64::consts::PI / spec.scale().a * (1.0 - 1e-9);
                    v
                }
            };
            let start: Vec<f64> = end.iter().map(|x| -x).collect();
            let table = evolve::dispersion(&spec, &bm, &start, &end, grid);
            write_out(&out, &io::dispersion_csv(&table))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BoundCheck { file, lambda, grid, tol, out } => {
            let spec = load_walk(&file)?;
            let bm = load_bm(&spec, tol)?;
            let report =
                evolve::appendix_a_bound(&spec, &bm, lambda, grid).map_err(|e| e.to_string())?;
            println!(
                "measured {:.6e} vs analytic {:.6e} (K = {}, qmax = {:.6})",
                report.measured, report.analytic, report.coin_count, report.qmax
            );
            if let Some(path) = &out {
                write_out(&Some(path.clone()), &io::bound_csv(&report))?;
            }
            if report.satisfied {
                println!("PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL: bound violated");
                Ok(ExitCode::from(EXIT_PHYSICAL))
            }
        }
        Command::ScalingStudy { file, name, mass, lambda, a_schedule, ratio, grid, tol, out } => {
            let schedule: Result<Vec<f64>, _> =
                a_schedule.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let schedule = schedule.map_err(|e| format!("invalid schedule: {e}"))?;
            let build: Box<
                dyn Fn(LatticeScale) -> Result<(WalkSpec, BMatrices), weylwalk::WalkError> + Sync,
            > = if let Some(name) = &name {
                let name = name.clone();
                Box::new(move |scale| {
                    let spec = zoo::build(&name, mass, scale)
                        .ok_or(weylwalk::WalkError::EmptySupport)?;
                    let decomp = spec.mass_decompose(tol)?;
                    let bm = continuum::b_matrices(&decomp, &spec);
                    Ok((spec, bm))
                })
            } else {
                let file = file.ok_or("either FILE or --name is required")?;
                let base = load_walk(&file)?;
                Box::new(move |scale| {
                    let spec = base.with_scale(scale);
                    let decomp = spec.mass_decompose(tol)?;
                    let bm = continuum::b_matrices(&decomp, &spec);
                    Ok((spec, bm))
                })
            };
            match evolve::scaling_fit(|s| build(s), lambda, grid, &schedule, ratio) {
                Ok(fit) => {
                    println!("exponent = {:.4}, r² = {:.6}", fit.exponent, fit.r_squared);
                    let mut csv = String::from("a,one_step_norm\r\n");
                    for (a, n) in &fit.points {
                        csv.push_str(&format!("{},{}\r\n", io::fmt_f64(*a), io::fmt_f64(*n)));
                    }
                    if let Some(path) = &out {
                        write_out(&Some(path.clone()), &csv)?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(weylwalk::WalkError::ExactlySolvable) => {
                    println!("exact: walk matches its continuum evolution at every sampled scale");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Evolve { file, p0, sigma, steps, sites, lambda, spin, tol, out } => {
            let spec = load_walk(&file)?;
            let bm = load_bm(&spec, tol)?;
            let d = spec.dim();
            let k = spec.internal_dim();
            let momentum = parse_vector(&p0, d)?;
            let internal = match spin {
                Some(text) => {
                    let vals: Result<Vec<f64>, _> =
                        text.split(',').map(|s| s.trim().parse::<f64>()).collect();
                    let vals = vals.map_err(|e| format!("invalid spin: {e}"))?;
                    if vals.len() != 2 * k {
                        return Err(format!("spin needs {} re,im values, got {}", 2 * k, vals.len()));
                    }
                    vals.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
                }
                None => default_internal(&bm, &momentum, k),
            };
            let pkt = packet::WavePacket {
                center: vec![0.0; d],
                momentum,
                width: sigma,
                internal,
            };
            let trace = packet::evolve_packet(&spec, &bm, &pkt, steps, sites, lambda)
                .map_err(|e| e.to_string())?;
            let v = trace.mean_velocity();
            println!("mean velocity = {v:?}");
            println!("final discrete-vs-continuum distance = {:.6e}", trace.final_distance);
            if let Some(w) = trace.out_of_band {
                println!("out-of-band weight = {w:.6e}");
            }
            write_out(&out, &io::packet_csv(&trace))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Zoo { command } => match command {
            ZooCommand::List => {
                for entry in zoo::ENTRIES {
                    let mass = if entry.massive { " (takes --mass)" } else { "" };
                    println!("{:<14} {}{}", entry.name, entry.description, mass);
                }
                Ok(ExitCode::SUCCESS)
            }
            ZooCommand::Export { name, mass, a, dt, out } => {
                let scale = LatticeScale::new(a, dt).map_err(|e| e.to_string())?;
                let spec = zoo::build(&name, mass, scale)
                    .ok_or_else(|| format!("unknown zoo entry {name:?}"))?;
                write_out(&out, &io::serialize_walk(&spec))?;
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

/// +1 eigenvector of σ·p̂₀ for 2-level walks, first basis vector otherwise.
fn default_internal(bm: &BMatrices, momentum: &[f64], k: usize) -> Vec<C64> {
    if k == 2 {
        let norm: f64 = momentum.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let h = continuum::hamiltonian_symbol(bm, momentum);
            // top eigenvector of H(p₀) ≈ spin aligned with motion
            let (vals, vecs) = weylwalk::linalg::eigh_pairs(&h);
            let top = vals
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            return vecs.column(top).to_vec();
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); k];
    v[0] = C64::new(1.0, 0.0);
    v
}

fn print_matrix(m: &weylwalk::linalg::CMat) {
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
        println!("  [{}]", cells.join(", "));
    }
}

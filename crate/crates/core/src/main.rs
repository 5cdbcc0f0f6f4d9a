use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use detmedian::adversary::{run_against, AdversaryParams, Budget, FinalMetric, MATRIX_LIMIT};
use detmedian::harness::{
    execute, exit_code, run_algorithm, run_sweep, verify, write_bench_csv, Algorithm, Generator, Instance,
    InstanceSpec, Outcome, SweepSpec, VerifyTarget,
};
use detmedian::metric::{opt_bruteforce, write_matrix_csv, InputFormat, Objective};
use detmedian::{Error, Result};

#[derive(Parser)]
#[command(name = "detmedian", version, about = "Deterministic metric k-median / k-means clustering")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one input file
    Cluster(ClusterArgs),
    /// Run a sweep and emit CSV
    Bench(BenchArgs),
    /// Run an algorithm against the adaptive adversary
    Adversary(AdversaryArgs),
    /// Run audits; exit 0 iff all pass
    Verify(VerifyArgs),
    /// Write a generated instance
    Gen(GenArgs),
}

#[derive(Args)]
struct GeneratorArgs {
    /// uniform, clustered or matrix
    #[arg(long, default_value = "uniform")]
    generator: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 100.0)]
    extent: f64,
    #[arg(long, default_value_t = 8)]
    clusters: usize,
    #[arg(long, default_value_t = 2.0)]
    spread: f64,
    #[arg(long, default_value_t = 100)]
    max_weight: u32,
}

impl GeneratorArgs {
    fn generator(&self) -> Result<Generator> {
        match self.generator.as_str() {
            "uniform" => Ok(Generator::UniformPoints { dim: self.dim, extent: self.extent }),
            "clustered" => Ok(Generator::ClusteredPoints { clusters: self.clusters, spread: self.spread, dim: self.dim }),
            "matrix" => Ok(Generator::RandomMatrix { max_weight: self.max_weight }),
            other => Err(Error::InvalidParameter(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// matrix, points-l2 or points-l1
    #[arg(long, default_value = "points-l2")]
    format: String,
    /// hierarchical, guha, reverse-greedy or local-search
    #[arg(long, default_value = "hierarchical")]
    algo: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "median")]
    objective: String,
    /// Guha's δ
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
    /// Brute-force OPT when feasible and run the bound audits
    #[arg(long)]
    audit: bool,
    /// Centers, one id per line (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run record
    #[arg(long)]
    record: Option<PathBuf>,
    /// Removal certificate as JSON (reverse-greedy only)
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    gen: GeneratorArgs,
    /// Comma-separated sizes
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "hierarchical")]
    algo: Vec<String>,
    /// δ values for guha
    #[arg(long, value_delimiter = ',', default_value = "2")]
    delta: Vec<f64>,
    #[arg(long, default_value = "median")]
    objective: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    audit: bool,
    /// CSV output (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long, default_value = "hierarchical")]
    algo: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// δ handed to guha when it is the algorithm under test
    #[arg(long, default_value_t = 2.0)]
    guha_delta: f64,
    #[arg(long, default_value = "median")]
    objective: String,
    /// Do not stop the algorithm at n·k·δ queries
    #[arg(long)]
    unlimited: bool,
    /// Final metric as a CSV matrix (n ≤ 2048)
    #[arg(long)]
    emit_metric: Option<PathBuf>,
    /// Audit report as JSON
    #[arg(long)]
    emit_report: Option<PathBuf>,
    /// Replayable session transcript as JSON
    #[arg(long)]
    emit_transcript: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check the metric axioms of this file
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "matrix")]
    format: String,
    /// Audit a removal certificate
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// OPT to audit the certificate against
    #[arg(long)]
    opt: Option<f64>,
    /// Replay an adversary transcript
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Run every audit on a generated corpus of this size
    #[arg(long)]
    corpus: Option<usize>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "median")]
    objective: String,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GeneratorArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.flush()?;
    Ok(())
}

fn cluster(a: ClusterArgs) -> Result<bool> {
    let format: InputFormat = a.format.parse()?;
    let objective: Objective = a.objective.parse()?;
    let algo = Algorithm::parse(&a.algo, a.delta)?;
    let inst = Instance::load(&a.input, format)?;
    if a.k == 0 || a.k > inst.n() {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n (k = {}, n = {})", a.k, inst.n())));
    }
    let record = execute(&inst, algo, a.k, objective, a.audit)?;
    let mut w = output(&a.out)?;
    for c in &record.centers {
        writeln!(w, "{c}")?;
    }
    w.flush()?;
    if let Some(path) = &a.certificate {
        let space = inst.space()?;
        let Outcome::ReverseGreedy(_, cert) = run_algorithm(&space, algo, a.k, objective)? else {
            return Err(Error::InvalidParameter("--certificate needs --algo reverse-greedy".into()));
        };
        let all = space.points();
        let cert = match opt_bruteforce(&space, a.k, &all, &all, objective) {
            Ok((opt, _)) => cert.with_opt(if objective == Objective::NormalizedMeans { opt * opt } else { opt }),
            Err(_) => cert,
        };
        write_json(path, &cert)?;
    }
    match &a.record {
        Some(path) => write_json(path, &record)?,
        None => eprintln!("{}", serde_json::to_string(&record)?),
    }
    Ok(record.audits_passed())
}

fn bench(a: BenchArgs) -> Result<bool> {
    let mut algorithms = Vec::new();
    for id in &a.algo {
        if id == "guha" {
            algorithms.extend(a.delta.iter().map(|&delta| Algorithm::Guha { delta }));
        } else {
            algorithms.push(Algorithm::parse(id, 2.0)?);
        }
    }
    let spec = SweepSpec {
        generator: a.gen.generator()?,
        ns: a.n,
        ks: a.k,
        algorithms,
        objective: a.objective.parse()?,
        seed: a.seed,
        audit: a.audit,
    };
    let records = run_sweep(&spec)?;
    write_bench_csv(output(&a.out)?, &records)?;
    Ok(records.iter().all(|r| r.audits_passed()))
}

fn adversary(a: AdversaryArgs) -> Result<bool> {
    let objective: Objective = a.objective.parse()?;
    let algo = Algorithm::parse(&a.algo, a.guha_delta)?;
    let params = AdversaryParams::new(a.n, a.k, a.delta, objective)?;
    let budget = if a.unlimited { Budget::Unlimited } else { Budget::Enforced(params.query_budget()) };
    let k = a.k;
    let session = run_against(params, budget, |space| {
        Ok(run_algorithm(space, algo, k, objective)?.solution().centers.clone())
    })?;
    let r = &session.report;
    println!(
        "n={} k={} delta={} M={:.2} log_M n={:.4} queries={} closed={}",
        r.n, r.k, r.delta, r.m, r.gate, r.algorithm_queries, r.closed
    );
    println!("cost={} witness={} ratio={:.4}{}", r.cost, r.witness_cost, r.ratio, if r.trivial { " (trivial regime)" } else { "" });
    for (name, ok) in r.checks() {
        println!("{name}: {}", if ok { "pass" } else { "FAIL" });
    }
    if let Some(path) = &a.emit_metric {
        if a.n > MATRIX_LIMIT {
            return Err(Error::InvalidParameter(format!("--emit-metric needs n <= {MATRIX_LIMIT}")));
        }
        let m = FinalMetric::new(&session.graph)?.to_matrix()?;
        write_matrix_csv(BufWriter::new(File::create(path)?), &m, None)?;
    }
    if let Some(path) = &a.emit_report {
        write_json(path, r)?;
    }
    if let Some(path) = &a.emit_transcript {
        write_json(path, &session.transcript())?;
    }
    Ok(r.passed())
}

fn verify_cmd(a: VerifyArgs) -> Result<bool> {
    let mut targets = Vec::new();
    if let Some(path) = a.input {
        targets.push(VerifyTarget::Metric { path, format: a.format.parse()? });
    }
    if let Some(path) = a.certificate {
        targets.push(VerifyTarget::Certificate { path, opt: a.opt });
    }
    if let Some(path) = a.transcript {
        targets.push(VerifyTarget::Transcript { path });
    }
    if let Some(n) = a.corpus {
        targets.push(VerifyTarget::Corpus { n, k: a.k, count: a.count, seed: a.seed, objective: a.objective.parse()? });
    }
    if targets.is_empty() {
        return Err(Error::InvalidParameter("nothing to verify".into()));
    }
    let mut ok = true;
    for t in &targets {
        let out = verify(t)?;
        for (name, pass) in &out.checks {
            println!("{name}: {}", if *pass { "pass" } else { "FAIL" });
        }
        ok &= out.passed();
    }
    Ok(ok)
}

fn gen(a: GenArgs) -> Result<bool> {
    let inst = InstanceSpec::new(a.gen.generator()?, a.n, a.seed).build()?;
    inst.write_csv(output(&a.out)?)?;
    eprintln!("format: {}", inst.format());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Cluster(a) => cluster(a),
        Command::Bench(a) => bench(a),
        Command::Adversary(a) => adversary(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

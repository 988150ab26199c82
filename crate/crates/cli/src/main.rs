use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use knice::bounds::{
    check_density_display, check_k0_family_with, check_k0_refined_with, check_lm_size,
    check_sum210, BoundReport,
};
use knice::closedform::pattern_or_table;
use knice::heightred::{upper_band, verify_height, HeightVerdict};
use knice::lp::{dual_matrix, perturbed_dual_matrix, GammaCache, DEFAULT_LP_BUDGET};
use knice::numtheory::{DensityTable, DensityTriple};
use knice::oracle::brute_force_max_capped;
use knice::rational::{to_decimal, to_fraction_string};
use knice::search::{compute_with_witness, max_size_with, MaxSizeOptions, MAX_SEARCH_K};
use knice::{Error, NiceSet};

const SHORT_TABLE_K: u64 = 400;
const SHORT_HEIGHT_K: u64 = 100_000;
const LONG_LP_BUDGET: u64 = 4096;

#[derive(Parser, Debug)]
#[command(
    name = "knice",
    version,
    about = "Maximum k-nice sets of primitive lattice vectors"
)]
struct Cli {
    /// Directory holding the gamma and density caches.
    #[arg(long, global = true, env = "KNICE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Lift the default size limits.
    #[arg(long, global = true)]
    long: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Maximum size over all heights, or the search at one height.
    Compute {
        #[arg(long)]
        k: u64,
        /// Search this height only, from baseline `--n`.
        #[arg(long)]
        h: Option<u64>,
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Starting value for the full search.
        #[arg(long)]
        baseline: Option<u64>,
        /// Print the witness set.
        #[arg(long)]
        witness: bool,
    },
    /// Exhaustive maximum for small k.
    Oracle {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        h_cap: Option<u64>,
        #[arg(long, default_value_t = knice::oracle::DEFAULT_ORACLE_CAP)]
        cap: u64,
    },
    /// Search results reconciled with the closed forms over a k-range.
    Table {
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Same as `--format csv`.
        #[arg(long)]
        csv: bool,
    },
    /// Exact optimum of the strip program.
    LpGamma {
        /// Single value.
        #[arg(long)]
        l: Option<u64>,
        /// Table of rho, alpha, gamma, beta for `1..=to`.
        #[arg(long, conflicts_with = "l")]
        to: Option<u64>,
        #[arg(long, default_value_t = 4)]
        decimals: usize,
    },
    /// Emit and verify a dual matrix.
    CertifyDual {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        perturbed: bool,
    },
    /// Height verdicts, one JSON object per line.
    VerifyHeight {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Check this height instead of the upper band.
        #[arg(long)]
        h: Option<u64>,
    },
    /// Exact inequality suites.
    Bounds {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest height for the `k0` suite.
        #[arg(long, default_value_t = 120)]
        h_max: u64,
        /// Largest k for the `lm-size` suite.
        #[arg(long, default_value_t = 40)]
        k_max: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Sum210,
    K0,
    K0new,
    LmSize,
    Density,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) => 1,
            Error::BudgetExceeded { .. } | Error::Overflow(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        msg: msg.into(),
    }
}

fn budget(what: &'static str, value: u64, limit: u64) -> Failure {
    Error::BudgetExceeded {
        what,
        value,
        budget: limit,
    }
    .into()
}

struct Run {
    cli: Cli,
    out: String,
    /// Set when a check ran to completion but did not pass.
    failed: bool,
}

impl Run {
    fn format(&self) -> Format {
        if self.cli.json {
            Format::Json
        } else {
            self.cli.format
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn lp_budget(&self) -> u64 {
        if self.cli.long {
            LONG_LP_BUDGET
        } else {
            DEFAULT_LP_BUDGET
        }
    }

    fn cache_path(&self, name: &str) -> Option<PathBuf> {
        self.cli.cache_dir.as_ref().map(|d| d.join(name))
    }

    /// Loads the gamma cache, starting afresh when it is missing or fails
    /// verification.
    fn load_gamma(&self) -> GammaCache {
        let b = self.lp_budget();
        let Some(path) = self.cache_path("gamma.txt") else {
            return GammaCache::new(b);
        };
        match fs::read_to_string(&path) {
            Ok(text) => GammaCache::from_cache_text(&text, b, true).unwrap_or_else(|e| {
                eprintln!("warning: discarding {}: {e}", path.display());
                GammaCache::new(b)
            }),
            Err(_) => GammaCache::new(b),
        }
    }

    fn store_gamma(&self, cache: &GammaCache) -> Result<(), Failure> {
        if let Some(path) = self.cache_path("gamma.txt") {
            write_file(&path, &cache.to_cache_text())?;
        }
        Ok(())
    }

    fn load_density(&self) -> DensityTable {
        let Some(path) = self.cache_path("density.txt") else {
            return DensityTable::new();
        };
        match fs::read_to_string(&path) {
            Ok(text) => DensityTable::from_cache_text(&text).unwrap_or_else(|e| {
                eprintln!("warning: discarding {}: {e}", path.display());
                DensityTable::new()
            }),
            Err(_) => DensityTable::new(),
        }
    }

    fn store_density(&self, table: &DensityTable) -> Result<(), Failure> {
        if let Some(path) = self.cache_path("density.txt") {
            write_file(&path, &table.to_cache_text())?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    // Write then rename so an interrupted run never leaves a torn cache.
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn witness_lines(w: &NiceSet) -> String {
    w.to_text().trim_end().to_string()
}

fn cmd_compute(
    run: &mut Run,
    k: u64,
    h: Option<u64>,
    n: u64,
    baseline: Option<u64>,
    show: bool,
) -> Result<(), Failure> {
    if k > MAX_SEARCH_K {
        return Err(budget("k", k, MAX_SEARCH_K));
    }
    if !run.cli.long && k > SHORT_TABLE_K * 5 {
        return Err(budget("k", k, SHORT_TABLE_K * 5));
    }
    match h {
        Some(h) => {
            let r = compute_with_witness(k, h, n)?;
            match run.format() {
                Format::Json => {
                    let mut v = serde_json::json!({"k": k, "h": h, "n": n, "value": r.value, "nodes": r.nodes});
                    if let Some(w) = r.witness.as_ref().filter(|_| show) {
                        v["witness"] = serde_json::to_value(w.points()).expect("points serialize");
                    }
                    run.line(v.to_string());
                }
                _ => {
                    run.line(format!("k={k} h={h} n={n} value={}", r.value));
                    if let Some(w) = r.witness.as_ref().filter(|_| show) {
                        run.line(witness_lines(w));
                    }
                }
            }
        }
        None => {
            let o = max_size_with(
                k,
                &MaxSizeOptions {
                    baseline,
                    only_height: None,
                },
            )?;
            match run.format() {
                Format::Json => {
                    let text = if show {
                        o.to_json()
                    } else {
                        knice::search::SearchOutcome {
                            witness: None,
                            ..o.clone()
                        }
                        .to_json()
                    };
                    run.line(text);
                }
                _ => {
                    run.line(format!("k={k} max_size={}", o.max_size));
                    if let Some(w) = o.witness.as_ref().filter(|_| show) {
                        run.line(witness_lines(w));
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_oracle(run: &mut Run, k: u64, h_cap: Option<u64>, cap: u64) -> Result<(), Failure> {
    let o = brute_force_max_capped(k, h_cap, cap)?;
    match run.format() {
        Format::Json => run.line(o.to_json()),
        _ => {
            run.line(format!("k={k} max_size={}", o.max_size));
            if let Some(w) = &o.witness {
                run.line(witness_lines(w));
            }
        }
    }
    Ok(())
}

fn cmd_table(run: &mut Run, from: u64, to: u64, csv: bool) -> Result<(), Failure> {
    if from < 3 || from > to {
        return Err(usage("table needs 3 <= --from <= --to"));
    }
    let limit = if run.cli.long {
        MAX_SEARCH_K
    } else {
        SHORT_TABLE_K
    };
    if to > limit {
        return Err(budget("k", to, limit));
    }
    let rows: Vec<Result<(u64, u64, knice::closedform::PatternValue), Error>> = (from..=to)
        .into_par_iter()
        .map(|k| {
            Ok((
                k,
                max_size_with(k, &MaxSizeOptions::default())?.max_size,
                pattern_or_table(k)?,
            ))
        })
        .collect();
    let fmt = if csv { Format::Csv } else { run.format() };
    if fmt == Format::Csv {
        run.line("k,N,closed_form,source,agree");
    }
    for r in rows {
        let (k, n, p) = r?;
        let agree = n == p.value;
        run.failed |= !agree;
        let source = serde_json::to_value(p.source).expect("enum serializes");
        let source = source.as_str().unwrap_or_default().to_string();
        match fmt {
            Format::Csv => run.line(format!("{k},{n},{},{source},{agree}", p.value)),
            Format::Json => run.line(
                serde_json::json!({"k": k, "N": n, "closed_form": p.value, "source": source, "agree": agree})
                    .to_string(),
            ),
            Format::Text => run.line(format!(
                "k={k} N={n} closed_form={} ({source}){}",
                p.value,
                if agree { "" } else { " MISMATCH" }
            )),
        }
    }
    Ok(())
}

fn cmd_lp_gamma(
    run: &mut Run,
    l: Option<u64>,
    to: Option<u64>,
    decimals: usize,
) -> Result<(), Failure> {
    let cache = run.load_gamma();
    let result = match (l, to) {
        (Some(l), None) => {
            if l == 0 {
                return Err(usage("--l must be positive"));
            }
            let g = cache.gamma(l)?;
            match run.format() {
                Format::Json => run.line(
                    serde_json::json!({"ell": l, "gamma": to_fraction_string(&g), "decimal": to_decimal(&g, decimals)})
                        .to_string(),
                ),
                Format::Csv => run.line(format!("{l},{},{}", to_fraction_string(&g), to_decimal(&g, decimals))),
                Format::Text => run.line(format!("{} ({})", to_fraction_string(&g), to_decimal(&g, decimals))),
            }
            Ok(())
        }
        (None, Some(to)) => {
            if to == 0 {
                return Err(usage("--to must be positive"));
            }
            if to > cache.budget() {
                return Err(budget("ell", to, cache.budget()));
            }
            let density = run.load_density();
            let triples: Vec<DensityTriple> = density.triples(to);
            let gammas: Vec<_> = (1..=to).into_par_iter().map(|l| cache.gamma(l)).collect();
            if run.format() != Format::Json {
                run.line("ell,rho,alpha,gamma,beta");
            }
            for (t, g) in triples.iter().zip(gammas) {
                let g = g?;
                let d = |q| to_decimal(q, decimals);
                if run.format() == Format::Json {
                    run.line(
                        serde_json::json!({
                            "ell": t.ell,
                            "rho": to_fraction_string(&t.rho),
                            "alpha": to_fraction_string(&t.alpha),
                            "gamma": to_fraction_string(&g),
                            "beta": to_fraction_string(&t.beta),
                        })
                        .to_string(),
                    );
                } else {
                    run.line(format!(
                        "{},{},{},{},{}",
                        t.ell,
                        d(&t.rho),
                        d(&t.alpha),
                        d(&g),
                        d(&t.beta)
                    ));
                }
            }
            run.store_density(&density)
        }
        _ => Err(usage("give exactly one of --l and --to")),
    };
    run.store_gamma(&cache)?;
    result
}

fn cmd_certify_dual(run: &mut Run, l: u64, perturbed: bool) -> Result<(), Failure> {
    if l == 0 {
        return Err(usage("--l must be positive"));
    }
    let limit = if run.cli.long {
        LONG_LP_BUDGET
    } else {
        DEFAULT_LP_BUDGET * 4
    };
    if l > limit {
        return Err(budget("ell", l, limit));
    }
    let cert = if perturbed {
        perturbed_dual_matrix(l)?
    } else {
        dual_matrix(l)?
    };
    let check = cert.verify();
    let below_one = cert.value < knice::rational::int(1);
    match run.format() {
        Format::Json => run.line(cert.to_json()),
        _ => {
            run.line(cert.to_text());
            run.line(format!(
                "feasibility: {}",
                match &check {
                    Ok(()) => "OK".to_string(),
                    Err(e) => format!("FAILED ({e})"),
                }
            ));
            run.line(format!(
                "value: {} ({}){}",
                to_fraction_string(&cert.value),
                to_decimal(&cert.value, 6),
                if below_one { " < 1" } else { "" }
            ));
        }
    }
    run.failed |= check.is_err() || (perturbed && !below_one);
    Ok(())
}

fn cmd_verify_height(run: &mut Run, from: u64, to: u64, h: Option<u64>) -> Result<(), Failure> {
    if from < 2 || from > to {
        return Err(usage("verify-height needs 2 <= --from <= --to"));
    }
    let limit = if run.cli.long {
        1 << 40
    } else {
        SHORT_HEIGHT_K
    };
    if to > limit {
        return Err(budget("k", to, limit));
    }
    let pairs: Vec<(u64, u64)> = (from..=to)
        .flat_map(|k| match h {
            Some(h) => (h <= k).then_some((k, h)).into_iter().collect::<Vec<_>>(),
            None => upper_band(k).map(|h| (k, h)).collect(),
        })
        .collect();
    let verdicts: Vec<Result<HeightVerdict, Error>> = pairs
        .par_iter()
        .map(|&(k, h)| verify_height(k, h))
        .collect();
    for v in verdicts {
        let v = v?;
        // Outside the band a negative verdict is an answer, not a failure.
        run.failed |= h.is_none() && !v.is_verified();
        run.line(serde_json::to_string(&v).expect("verdict serializes"));
    }
    Ok(())
}

fn emit_report(run: &mut Run, r: &BoundReport) {
    run.failed |= !r.holds;
    let text = if run.format() == Format::Json {
        r.to_json()
    } else {
        r.to_text()
    };
    run.line(text);
}

fn cmd_bounds(run: &mut Run, suite: Suite, h_max: u64, k_max: u64) -> Result<(), Failure> {
    let reports = match suite {
        Suite::Sum210 => vec![check_sum210()],
        Suite::Density => vec![check_density_display(41020)],
        Suite::LmSize => {
            let limit = if run.cli.long { 200 } else { 60 };
            if k_max > limit {
                return Err(budget("k", k_max, limit));
            }
            vec![check_lm_size(3, k_max)?]
        }
        Suite::K0 | Suite::K0new => {
            let cache = run.load_gamma();
            let top = if suite == Suite::K0 { h_max } else { 66 };
            if top > cache.budget() {
                return Err(budget("h_max", top, cache.budget()));
            }
            // Largest programs first so the pool stays busy.
            let solved: Result<Vec<_>, Error> = (4..=top.max(4))
                .rev()
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|h| cache.gamma(h))
                .collect();
            let r = solved.and_then(|_| {
                if suite == Suite::K0 {
                    check_k0_family_with(&cache, h_max)
                } else {
                    check_k0_refined_with(&cache)
                }
            });
            run.store_gamma(&cache)?;
            vec![r?]
        }
    };
    for r in &reports {
        emit_report(run, r);
    }
    Ok(())
}

fn dispatch(run: &mut Run) -> Result<(), Failure> {
    match &run.cli.cmd {
        Cmd::Compute {
            k,
            h,
            n,
            baseline,
            witness,
        } => {
            let (k, h, n, b, w) = (*k, *h, *n, *baseline, *witness);
            cmd_compute(run, k, h, n, b, w)
        }
        Cmd::Oracle { k, h_cap, cap } => {
            let (k, h_cap, cap) = (*k, *h_cap, *cap);
            cmd_oracle(run, k, h_cap, cap)
        }
        Cmd::Table { from, to, csv } => {
            let (from, to, csv) = (*from, *to, *csv);
            cmd_table(run, from, to, csv)
        }
        Cmd::LpGamma { l, to, decimals } => {
            let (l, to, d) = (*l, *to, *decimals);
            cmd_lp_gamma(run, l, to, d)
        }
        Cmd::CertifyDual { l, perturbed } => {
            let (l, p) = (*l, *perturbed);
            cmd_certify_dual(run, l, p)
        }
        Cmd::VerifyHeight { from, to, h } => {
            let (from, to, h) = (*from, *to, *h);
            cmd_verify_height(run, from, to, h)
        }
        Cmd::Bounds {
            suite,
            h_max,
            k_max,
        } => {
            let (s, h, k) = (*suite, *h_max, *k_max);
            cmd_bounds(run, s, h, k)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let mut run = Run {
        cli,
        out: String::new(),
        failed: false,
    };
    let status = dispatch(&mut run);
    let written = match &run.cli.out {
        Some(path) => write_file(path, &run.out).map_err(|f| f.msg),
        None => std::io::stdout()
            .write_all(run.out.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match status {
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
        Ok(()) if run.failed => {
            eprintln!("error: verification failed");
            ExitCode::from(2)
        }
        Ok(()) => ExitCode::SUCCESS,
    }
}

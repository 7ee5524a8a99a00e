//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;

use crate::absorbing::{
    cycle_count_bounds, d2_of, enumerate_uas, involvement_counts, nf_of, CanonicalUas, UasConfig,
    UasInstance,
};
use crate::analysis::{basis_intersections, fractions, TSV_HEADER};
use crate::cycles::enumerate_cycles;
use crate::designer::{design_md, DesignInput, DesignOptions};
use crate::error::{Error, Result};
use crate::oracle::{
    enumerate_md_uas, exhaustive_fractions, full_enumeration_fractions, monte_carlo_avg,
    EmpiricalFractions,
};
use crate::relocation::{Modulus, UnitLayout};
use crate::tanner::{
    build_graph, check_no_4cycles, check_regular_gamma, expand_qc, parse_alist, parse_qc,
    write_alist, BinaryMatrix, QcMatrix, TannerGraph,
};
use crate::{analysis::avg_md_instances, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 10;
pub const EXIT_MISMATCH: i32 = 11;

#[derive(Debug, Parser)]
#[command(
    name = "mdcode",
    version,
    about = "Design MD codes that avoid a target absorbing set"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Column weight, 4-cycles, cycle counts and UAS instances of a code.
    Analyze(AnalyzeArgs),
    /// Closed-form relocation fractions, optionally checked by exhaustion.
    Fractions(FractionsArgs),
    /// Run the greedy relocation design.
    Design(DesignArgs),
    /// Count UAS instances in an MD matrix.
    Verify(VerifyArgs),
    /// Exhaustive fractions or a Monte Carlo average.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `a,d1[,gamma]` or `uas:<name>`.
    #[arg(long)]
    pub uas: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub max_cycle_len: usize,
    #[arg(long)]
    pub entry_granularity: bool,
}

#[derive(Debug, Args)]
pub struct FractionsArgs {
    /// `uas:<name>`, or `a,d1[,gamma]` together with `--input`.
    #[arg(long)]
    pub uas: Option<String>,
    /// Matrix holding a single UAS (all of its columns).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "M")]
    pub m: u32,
    /// Append exhaustively measured fractions and a match flag.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "M")]
    pub m: u32,
    #[arg(long)]
    pub uas: String,
    #[arg(long)]
    pub out_md: Option<PathBuf>,
    #[arg(long)]
    pub out_reloc: Option<PathBuf>,
    /// Report TSV path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub entry_granularity: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub md: PathBuf,
    #[arg(long)]
    pub uas: String,
    #[arg(long)]
    pub expect: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub uas: String,
    #[arg(long = "M")]
    pub m: u32,
    /// Host for a Monte Carlo average; without it the canonical UAS named by
    /// `--uas` is measured exhaustively.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also sweep every assignment, not just the shift classes.
    #[arg(long)]
    pub full: bool,
}

/// Parsed `--uas` value; `gamma` may still be unknown.
#[derive(Debug, Clone)]
pub enum UasSpec {
    Canonical(CanonicalUas),
    Config {
        a: usize,
        d1: usize,
        gamma: Option<usize>,
    },
}

impl UasSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(c) = CanonicalUas::by_name(s) {
            return Ok(UasSpec::Canonical(c));
        }
        if s.starts_with("uas:") {
            return Err(Error::InvalidConfig(format!(
                "unknown UAS {s}; known: {}",
                CanonicalUas::NAMES.join(", ")
            )));
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidConfig(format!("cannot read UAS spec {s:?}")))?;
        match parts[..] {
            [a, d1] => Ok(UasSpec::Config { a, d1, gamma: None }),
            [a, d1, gamma] => Ok(UasSpec::Config {
                a,
                d1,
                gamma: Some(gamma),
            }),
            _ => Err(Error::InvalidConfig(format!("cannot read UAS spec {s:?}"))),
        }
    }

    /// Resolves gamma against a matrix column weight.
    pub fn config(&self, host_gamma: Option<usize>) -> Result<UasConfig> {
        let (a, d1, gamma) = match self {
            UasSpec::Canonical(c) => {
                let c = c.config();
                (c.a, c.d1, Some(c.gamma))
            }
            UasSpec::Config { a, d1, gamma } => (*a, *d1, *gamma),
        };
        let gamma = match (gamma, host_gamma) {
            (Some(g), Some(h)) if g != h => {
                return Err(Error::GammaMismatch {
                    expected: g,
                    found: Some(h),
                })
            }
            (Some(g), _) | (None, Some(g)) => g,
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "gamma is not given and the matrix is not column-regular".into(),
                ))
            }
        };
        UasConfig::new(a, d1, gamma)
    }
}

enum Code {
    Qc(QcMatrix),
    Binary(BinaryMatrix),
}

impl Code {
    fn matrix(&self) -> BinaryMatrix {
        match self {
            Code::Qc(q) => expand_qc(q),
            Code::Binary(b) => b.clone(),
        }
    }
}

fn read_code(path: &Path) -> Result<Code> {
    let text = fs::read_to_string(path)?;
    if text.split_whitespace().next() == Some("qc") {
        parse_qc(&text).map(Code::Qc)
    } else {
        parse_alist(&text).map(Code::Binary)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::DuplicateEntry { .. } | Error::OutOfRange { .. } => EXIT_PARSE,
        Error::InvalidConfig(_)
        | Error::InvalidModulus(_)
        | Error::GammaMismatch { .. }
        | Error::Dimension(_)
        | Error::ZeroPosition(..)
        | Error::RelocationValue { .. } => EXIT_CONFIG,
        _ => EXIT_OTHER,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let r = pool.install(|| run(&cli.command, &mut buf));
                let _ = out.write_all(&buf);
                r
            }
            Err(e) => Err(Error::Internal(e.to_string())),
        },
        None => run(&cli.command, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Analyze(a) => analyze(a, out),
        Command::Fractions(a) => cmd_fractions(a, out),
        Command::Design(a) => design(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Oracle(a) => oracle(a, out),
    }
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let code = read_code(&args.input)?;
    let h = code.matrix();
    let g = build_graph(&h);
    let gamma = check_regular_gamma(&h);
    writeln!(out, "rows\t{}", h.n_rows())?;
    writeln!(out, "cols\t{}", h.n_cols())?;
    writeln!(out, "nnz\t{}", h.nnz())?;
    writeln!(
        out,
        "gamma\t{}",
        gamma.map_or("irregular".into(), |g| g.to_string())
    )?;
    writeln!(out, "no_4cycles\t{}", check_no_4cycles(&g))?;
    let cycles = enumerate_cycles(&g, args.max_cycle_len);
    for len in (4..=args.max_cycle_len).step_by(2) {
        writeln!(
            out,
            "cycles_{len}\t{}",
            cycles.iter().filter(|c| c.len() == len).count()
        )?;
    }
    let Some(spec) = &args.uas else {
        return Ok(EXIT_OK);
    };
    let c = UasSpec::parse(spec)?.config(gamma)?;
    let n_f = nf_of(&c)?;
    let (lo, hi) = cycle_count_bounds(n_f);
    writeln!(out, "config\t{}", c.label())?;
    writeln!(out, "d2\t{}", d2_of(&c)?)?;
    writeln!(out, "n_f\t{n_f}")?;
    writeln!(out, "n_c_bounds\t{lo}\t{hi}")?;
    let instances = enumerate_uas(&g, &c);
    writeln!(out, "instances\t{}", instances.len())?;
    for u in &instances {
        let n_c = enumerate_cycles(&u.deg2_subgraph(&g), 2 * u.a()).len();
        let vns: Vec<String> = u.vns().iter().map(|v| v.to_string()).collect();
        writeln!(out, "instance\t{}\tn_c={n_c}", vns.join(","))?;
    }
    let layout = match &code {
        Code::Qc(q) if !args.entry_granularity => UnitLayout::circulants(q, &h),
        _ => UnitLayout::entries(&h),
    };
    writeln!(out, "unit_row\tunit_col\tinvolved")?;
    for ((r, col), n) in involvement_counts(&instances, None, &layout)? {
        if n > 0 {
            writeln!(out, "{r}\t{col}\t{n}")?;
        }
    }
    Ok(EXIT_OK)
}

/// The UAS instance and its host graph for `fractions` and `oracle`.
fn uas_subject(spec: &UasSpec, input: Option<&Path>) -> Result<(String, TannerGraph, UasInstance)> {
    match (spec, input) {
        (UasSpec::Canonical(c), None) => {
            let g = build_graph(c.incidence());
            let u = c.instance(&g);
            Ok((c.name().to_string(), g, u))
        }
        (_, Some(path)) => {
            let h = read_code(path)?.matrix();
            let c = spec.config(check_regular_gamma(&h))?;
            let g = build_graph(&h);
            let all: Vec<usize> = (0..h.n_cols()).collect();
            let u = UasInstance::from_vns(&g, &all)
                .filter(|u| u.matches(&c))
                .ok_or_else(|| Error::InvalidConfig(format!("input is not a {c} UAS")))?;
            Ok((c.label(), g, u))
        }
        (UasSpec::Config { .. }, None) => Err(Error::InvalidConfig(
            "an a,d1 spec needs --input with the UAS subgraph".into(),
        )),
    }
}

fn empirical_columns(e: &EmpiricalFractions) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        e.f_0(),
        e.f_1(),
        e.f_nof(),
        e.f_nou(),
        e.f_not(),
        e.f_all_cycles_inactive()
    )
}

fn cmd_fractions(args: &FractionsArgs, out: &mut dyn Write) -> Result<i32> {
    let m = Modulus::new(args.m)?;
    let spec = match &args.uas {
        Some(s) => UasSpec::parse(s)?,
        None => UasSpec::Config {
            a: 0,
            d1: 0,
            gamma: None,
        },
    };
    let spec = match (&spec, &args.input) {
        // without --uas the whole input decides the configuration
        (UasSpec::Config { a: 0, .. }, Some(path)) => {
            let h = read_code(path)?.matrix();
            let g = build_graph(&h);
            let all: Vec<usize> = (0..h.n_cols()).collect();
            let u = UasInstance::from_vns(&g, &all)
                .ok_or_else(|| Error::InvalidConfig("input is not a UAS".into()))?;
            UasSpec::Config {
                a: u.a(),
                d1: u.d1(),
                gamma: check_regular_gamma(&h),
            }
        }
        _ => spec,
    };
    let (name, g, u) = uas_subject(&spec, args.input.as_deref())?;
    let b = u.cycle_basis(&g)?;
    let bi = basis_intersections(&b, &g);
    let r = fractions::<Rational>(b.len(), m, bi.l1.len(), bi.l2.len());
    let pct = |x: &Rational| x.to_f64().map_or("nan".to_string(), |v| format!("{v:.2}"));
    let mut header = format!("{TSV_HEADER}\ts1_pct_approx\ts2_pct_approx");
    let mut row = format!(
        "{}\t{}\t{}",
        r.tsv_row(&name),
        pct(&r.s1_pct),
        pct(&r.s2_pct)
    );
    if args.oracle {
        let e = exhaustive_fractions(&u, &g, m)?;
        let ok = e.f_0() == r.f_0
            && e.f_nof() == r.f_nof
            && e.f_nou() == r.f_nou
            && e.f_not() == r.f_not
            && e.f_all_cycles_inactive() <= r.f_noc_bound;
        header.push_str(
            "\temp_f_0\temp_f_1\temp_f_nof\temp_f_nou\temp_f_not\temp_all_inactive\tmatch",
        );
        row.push_str(&format!("\t{}\t{ok}", empirical_columns(&e)));
    }
    writeln!(out, "{header}")?;
    writeln!(out, "{row}")?;
    if r.f_not_negative() {
        writeln!(out, "# f_not is negative: the closed form does not apply")?;
    }
    Ok(EXIT_OK)
}

fn design(args: &DesignArgs, out: &mut dyn Write) -> Result<i32> {
    let m = Modulus::new(args.m)?;
    let code = read_code(&args.input)?;
    let c = UasSpec::parse(&args.uas)?.config(check_regular_gamma(&code.matrix()))?;
    let input = match code {
        Code::Qc(q) => DesignInput::Qc(q),
        Code::Binary(b) => DesignInput::Binary(b),
    };
    let opts = DesignOptions {
        entry_granularity: args.entry_granularity,
        ..Default::default()
    };
    let (h_md, map, report) = design_md(&input, m, &c, &opts)?;
    if let Some(p) = &args.out_md {
        fs::write(p, write_alist(&h_md))?;
    }
    if let Some(p) = &args.out_reloc {
        fs::write(p, map.to_text())?;
    }
    let tsv = report.to_tsv();
    match &args.report {
        Some(p) => {
            fs::write(p, &tsv)?;
            writeln!(out, "initial_md\t{}", report.initial_md)?;
            writeln!(out, "final_active\t{}", report.final_active)?;
            writeln!(
                out,
                "relocated\t{}/{}\t{:.2}%",
                report.units_relocated,
                report.units_total,
                100.0 * report.relocated_fraction()
            )?;
        }
        None => write!(out, "{tsv}")?,
    }
    Ok(if report.final_active == 0 {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    })
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let h = read_code(&args.md)?.matrix();
    let c = UasSpec::parse(&args.uas)?.config(check_regular_gamma(&h))?;
    let n = enumerate_md_uas(&h, &c);
    writeln!(out, "config\t{}", c.label())?;
    writeln!(out, "instances\t{n}")?;
    match args.expect {
        Some(e) if e != n => {
            writeln!(out, "mismatch\texpected {e}, found {n}")?;
            Ok(EXIT_MISMATCH)
        }
        Some(_) => {
            writeln!(out, "match\ttrue")?;
            Ok(EXIT_OK)
        }
        None => Ok(EXIT_OK),
    }
}

fn oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let m = Modulus::new(args.m)?;
    let spec = UasSpec::parse(&args.uas)?;
    if let Some(path) = &args.input {
        let h = read_code(path)?.matrix();
        let c = spec.config(check_regular_gamma(&h))?;
        let a_od = enumerate_uas(&build_graph(&h), &c).len();
        let mc = monte_carlo_avg(&h, &c, m, args.trials, args.seed)?;
        let formula: f64 = avg_md_instances(a_od as u64, nf_of(&c)?, m);
        let within = (mc.mean - formula).abs() <= 3.0 * mc.std_error.max(f64::EPSILON);
        writeln!(
            out,
            "config\ttrials\ta_od\tmean\tstd_error\tformula\twithin_3se"
        )?;
        writeln!(
            out,
            "{}\t{}\t{a_od}\t{:.6}\t{:.6}\t{:.6}\t{within}",
            c.label(),
            mc.trials,
            mc.mean,
            mc.std_error,
            formula
        )?;
        return Ok(EXIT_OK);
    }
    let (name, g, u) = uas_subject(&spec, None)?;
    let e = exhaustive_fractions(&u, &g, m)?;
    writeln!(
        out,
        "config\tM\tclasses\tf_0\tf_1\tf_nof\tf_nou\tf_not\tall_inactive"
    )?;
    writeln!(out, "{name}\t{m}\t{}\t{}", e.classes, empirical_columns(&e))?;
    if args.full {
        let full = full_enumeration_fractions(&u, &g, m)?;
        writeln!(out, "full_sweep_matches\t{}", full == e)?;
    }
    Ok(EXIT_OK)
}

//! Command-line front end: generate fusion tables by any of the three
//! methods, run the cross-method verification suite, and report q-series
//! character-transform residuals.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use lcft_fusion::alpha_modular::DEFAULT_X;
use lcft_fusion::block_diag::prefusion_matrices;
use lcft_fusion::closed_form::closed_table;
use lcft_fusion::limit_verlinde::{limit_prefusion, DEFAULT_ALPHAS};
use lcft_fusion::replacement::replace_table;
use lcft_fusion::tables::{
    render_latex, render_text, Method, PreFusionTable, Stage, TableDocument,
};
use lcft_fusion::theta::{
    verify_char_identity, verify_s_transform, verify_t_transform, QSeriesContext,
};
use lcft_fusion::verify::{self, VerifyOptions, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "lcft-fusion",
    about = "Fusion rules of the c_{p,1} triplet models from modular data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pre-fusion or fusion table and emit it as JSON, text or LaTeX.
    Gen(GenArgs),
    /// Run the full cross-method verification suite over a range of p.
    Verify(VerifyArgs),
    /// Evaluate q-series character-transform residuals.
    Chars(CharsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Kac parameter p >= 2
    #[arg(long)]
    p: u32,
    /// Table construction: limit | blockdiag | closed
    #[arg(long, default_value = "blockdiag")]
    method: String,
    /// pre (before replacement) or post (fusion rules)
    #[arg(long, default_value = "pre")]
    stage: String,
    /// Output format: json | text | latex
    #[arg(long, default_value = "text")]
    format: String,
    /// Omit volatile metadata (timestamps) for byte-reproducible output
    #[arg(long)]
    canonical: bool,
    /// Write to a file instead of standard output
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Range of p values, e.g. "2..12" (inclusive) or a single "3"
    #[arg(long, default_value = "2..6")]
    p: String,
    /// Residual tolerance for the group relations (default 1e-9; the
    /// LCFT_FUSION_TOL environment variable overrides it)
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated decreasing alpha schedule for the limits
    #[arg(long)]
    alphas: Option<String>,
    /// Also run the q-series character checks (slower)
    #[arg(long)]
    chars: bool,
}

#[derive(Args)]
struct CharsArgs {
    /// Kac parameter p >= 2
    #[arg(long)]
    p: u32,
    /// Deformation parameter alpha != 0
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Evaluation point tau in the upper half-plane, e.g. "0.3+1.7i" or "0+1i"
    #[arg(long, default_value = "0+1i")]
    tau: String,
    /// Summation range |n| <= terms
    #[arg(long, default_value_t = 200)]
    terms: usize,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    // forms: "a+bi", "a-bi", "bi", "i", "a"
    let t = s.trim().replace(' ', "");
    if let Some(rest) = t.strip_suffix('i') {
        // split at the last interior +/- (not a leading sign, not an
        // exponent sign)
        let bytes = rest.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-')
                && bytes[k - 1] != b'e'
                && bytes[k - 1] != b'E'
            {
                split = Some(k);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(k) => (&rest[..k], &rest[k..]),
            None => ("", rest),
        };
        let re: f64 = if re_str.is_empty() {
            0.0
        } else {
            re_str
                .parse()
                .map_err(|_| format!("bad real part in {s:?}"))?
        };
        let im: f64 = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse()
                .map_err(|_| format!("bad imaginary part in {s:?}"))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        t.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("cannot parse complex number {s:?}"))
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: u32 = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
        let hi: u32 = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok((lo, hi))
    } else {
        let v: u32 = t.parse().map_err(|_| format!("bad p value {s:?}"))?;
        Ok((v, v))
    }
}

fn parse_alphas(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad alpha {x:?}"))
        })
        .collect()
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn build_table(
    p: u32,
    method: Method,
    stage: Stage,
    alphas: &[f64],
) -> lcft_fusion::Result<PreFusionTable> {
    let pre = match method {
        Method::Limit => limit_prefusion(p, alphas, 1e-5)?.1,
        Method::BlockDiag => prefusion_matrices(p)?,
        Method::Closed => closed_table(p, Stage::Pre)?,
    };
    match stage {
        Stage::Pre => Ok(pre),
        Stage::Post => {
            if method == Method::Closed {
                // closed post forms come straight from their own formulas
                closed_table(p, Stage::Post)
            } else {
                Ok(replace_table(p, &pre)?.table)
            }
        }
    }
}

fn cmd_gen(args: &GenArgs) -> ExitCode {
    if args.p < 2 {
        return usage_error("p must be >= 2");
    }
    let method: Method = match args.method.parse() {
        Ok(m) => m,
        Err(e) => return usage_error(&e.to_string()),
    };
    let stage: Stage = match args.stage.parse() {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };
    let table = match build_table(args.p, method, stage, &DEFAULT_ALPHAS) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let rendered = match args.format.as_str() {
        "json" => TableDocument::from_table(&table, DEFAULT_TOL, &DEFAULT_ALPHAS, args.canonical)
            .map(|d| d.to_json()),
        "text" => render_text(&table),
        "latex" => render_latex(&table),
        other => return usage_error(&format!("unknown format {other:?}")),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &args.out {
        None => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Some(path) => {
            match std::fs::File::create(path).and_then(|mut f| f.write_all(rendered.as_bytes())) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let (p_min, p_max) = match parse_range(&args.p) {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    if p_min < 2 {
        return usage_error("p must be >= 2");
    }
    let mut opts = VerifyOptions::range(p_min, p_max);
    if let Ok(env_tol) = std::env::var("LCFT_FUSION_TOL") {
        match env_tol.parse::<f64>() {
            Ok(t) => opts.tol = t,
            Err(_) => return usage_error("LCFT_FUSION_TOL must be a number"),
        }
    }
    if let Some(tol) = args.tol {
        opts.tol = tol;
    }
    if let Some(alphas) = &args.alphas {
        match parse_alphas(alphas) {
            Ok(a) => opts.alphas = a,
            Err(e) => return usage_error(&e),
        }
    }
    opts.with_characters = args.chars;
    let report = verify::run(&opts);
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if c.p == 0 {
            println!("{status}  {:<16} {}", c.name, c.detail);
        } else {
            println!("{status}  p={:<3} {:<16} {}", c.p, c.name, c.detail);
        }
    }
    if report.all_passed() {
        println!("all checks passed");
        ExitCode::SUCCESS
    } else {
        if let Some(first) = report.first_failure() {
            eprintln!(
                "first failure: p={} {}: {}",
                first.p, first.name, first.detail
            );
        }
        ExitCode::from(1)
    }
}

fn cmd_chars(args: &CharsArgs) -> ExitCode {
    if args.p < 2 {
        return usage_error("p must be >= 2");
    }
    if args.alpha == 0.0 {
        return usage_error("alpha must be nonzero");
    }
    let tau = match parse_complex(&args.tau) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    if tau.im <= 0.0 {
        return usage_error("tau must lie in the upper half-plane");
    }
    let ctx = match QSeriesContext::new(args.terms, tau, 1e-9) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    let run = || -> lcft_fusion::Result<Vec<(String, f64)>> {
        let mut rows = Vec::new();
        rows.push((
            "S-transform".to_string(),
            verify_s_transform(args.p, args.alpha, DEFAULT_X, &ctx)?,
        ));
        rows.push((
            "T-transform".to_string(),
            verify_t_transform(args.p, args.alpha, DEFAULT_X, &ctx)?,
        ));
        for s in 1..args.p {
            rows.push((
                format!("char-identity s={s}"),
                verify_char_identity(args.p, s, args.alpha, &ctx)?,
            ));
        }
        Ok(rows)
    };
    match run() {
        Ok(rows) => {
            let tol = 1e-7;
            let mut ok = true;
            for (name, residual) in &rows {
                let status = if *residual < tol { "PASS" } else { "FAIL" };
                ok &= *residual < tol;
                println!("{status}  {name:<20} residual {residual:.3e}");
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Chars(args) => cmd_chars(args),
    }
}

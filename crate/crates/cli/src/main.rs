//! `heightlab` command-line front end.
//!
//! Every command prints one JSON envelope
//! `{schema_version, command, inputs, results, error_bounds, runtime_ms}`;
//! tables can also be printed as aligned text or CSV with `--format`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use heightlab::elliptic::{ap_count, reduction_type, EcPoint, ReductionType};
use heightlab::equidist::{bernoulli_uniformity, gauss_statistic, suz_torsion_average, uniform_grid};
use heightlab::gmheights::{is_root_of_unity, weil_height, HeightExpr};
use heightlab::kummer::{
    amoroso_condition, descent_chain, metric_gap_check, sample_monomial, sigma_action, tower_degree, TowerLevel,
};
use heightlab::ntheight::{nt_height, HeightMode, NtHeight, Place, LIMIT_DEPTH, SERIES_DEPTH};
use heightlab::numkernel::arith::{primes_up_to, rat_to_f64};
use heightlab::ser::sig12;
use heightlab::survey::{parse_rational, run_survey, SurveyConfig, SurveyReport};
use heightlab::{Error, RationalCurve, RationalPoint};

const SCHEMA_VERSION: &str = "heightlab/1";
const PMAX_CEILING: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "heightlab", version, about = "Heights of small points over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Weil height of a product of rationals, roots of unity and radicals.
    Height {
        /// e.g. "root(2,8)", "zeta(7)", "7/2", "zeta(9,2)*root(3,9)^5"
        expr: String,
    },
    /// Néron–Tate height with the per-place breakdown.
    NtHeight {
        #[arg(long, allow_hyphen_values = true, value_name = "A,B")]
        curve: String,
        #[arg(long, allow_hyphen_values = true, value_name = "X,Y")]
        point: String,
        /// Also compute the doubling limit and compare.
        #[arg(long)]
        both: bool,
        #[arg(long, default_value_t = SERIES_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = LIMIT_DEPTH)]
        limit_depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Traces of Frobenius and supersingular primes 5 ≤ p ≤ pmax.
    Supersingular {
        #[arg(long, allow_hyphen_values = true, value_name = "A,B")]
        curve: String,
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Degree, descent chain, generator and metric gaps of a tower level.
    Tower {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
    /// Galois-orbit statistics.
    Equidist {
        #[command(subcommand)]
        which: Equidist,
    },
    /// Survey driven by a configuration file.
    Survey {
        #[arg(long)]
        config: PathBuf,
        /// Directory for survey_report.json and survey_report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Equidist {
    /// Average of min(|β|, 1/|β|) over the conjugates of a^(1/p^n) at p
    Gauss {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Average of min(cap, λ_∞) over the nonzero N-torsion points
    Suz {
        #[arg(long, allow_hyphen_values = true, value_name = "A,B")]
        curve: String,
        /// Odd torsion order, 3 ≤ N ≤ 13
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 5.0)]
        cap: f64,
        #[arg(long, default_value_t = 24)]
        depth: usize,
    },
    /// Exact average of x² − x + 1/6 over a grid or a list of values
    Bernoulli {
        /// Uniform grid j/N.
        #[arg(long, conflicts_with = "values")]
        grid: Option<u64>,
        /// Comma-separated values in [0, 1).
        #[arg(long)]
        values: Option<String>,
    },
}

struct Output {
    command: &'static str,
    inputs: Value,
    results: Value,
    error_bounds: Value,
    /// Replaces the JSON envelope on stdout when set.
    table: Option<String>,
}

fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn rational(s: &str) -> Result<BigRational, Error> {
    parse_rational(s).map_err(validation)
}

fn pair(s: &str, what: &str) -> Result<(BigRational, BigRational), Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(validation(format!("{what} must be two comma-separated rationals, got {s:?}")));
    }
    Ok((rational(parts[0])?, rational(parts[1])?))
}

fn curve(s: &str) -> Result<RationalCurve, Error> {
    let (a, b) = pair(s, "--curve")?;
    RationalCurve::new(a, b).map_err(|e| validation(e.to_string()))
}

fn place_name(p: &Place) -> String {
    p.to_string()
}

fn nt_json(h: &NtHeight) -> Value {
    let mut v = json!({
        "value": sig12(h.value),
        "error": sig12(h.error),
        "torsion_order": h.torsion_order,
    });
    if let Some(b) = &h.breakdown {
        v["entries"] = serde_json::to_value(b.entries.values().collect::<Vec<_>>()).unwrap();
    }
    v
}

fn cmd_height(expr: &str) -> Result<Output, Error> {
    let e: HeightExpr = expr.parse()?;
    let exact = e.exact_height();
    let numeric = match e.realize() {
        Ok(alpha) => {
            let h = weil_height(&alpha);
            Some(json!({
                "value": sig12(h.value),
                "error": sig12(h.error),
                "degree": alpha.degree(),
                "minpoly": alpha.minpoly().to_string(),
                "root_of_unity_order": is_root_of_unity(&alpha),
            }))
        }
        Err(Error::Unsupported(_)) => None,
        Err(err) => return Err(err),
    };
    Ok(Output {
        command: "height",
        inputs: json!({ "expr": expr }),
        results: json!({
            "height": sig12(exact.value()),
            "exact": exact.to_string(),
            "numeric": numeric,
        }),
        error_bounds: json!({ "height": 0.0 }),
        table: None,
    })
}

fn cmd_nt_height(
    curve_s: &str,
    point_s: &str,
    both: bool,
    depth: usize,
    limit_depth: usize,
    format: Format,
) -> Result<Output, Error> {
    let e = curve(curve_s)?;
    let (x, y) = pair(point_s, "--point")?;
    let p: RationalPoint = EcPoint::new(x, y);
    if !e.contains(&p) {
        return Err(validation(format!(
            "point {p} is not on y^2 = x^3 + ({})x + ({}): residual y^2 - x^3 - Ax - B = {}",
            e.a,
            e.b,
            e.residual(&p)
        )));
    }
    let local = nt_height(&e, &p, HeightMode::LocalSum, Some(depth))?;
    let limit = if both { Some(nt_height(&e, &p, HeightMode::Limit, Some(limit_depth))?) } else { None };
    let mut results = json!({ "local_sum": nt_json(&local) });
    let mut bounds = json!({ "local_sum": sig12(local.error) });
    if let Some(l) = &limit {
        let gap = (l.value - local.value).abs();
        results["limit"] = nt_json(l);
        results["mode_gap"] = json!(sig12(gap));
        results["modes_agree"] = json!(gap <= local.error + l.error + 1e-12);
        bounds["limit"] = json!(sig12(l.error));
    }
    let table = (format == Format::Text).then(|| {
        let mut t = format!("curve y^2 = x^3 + ({})x + ({})   point {p}\n", e.a, e.b);
        if let Some(o) = local.torsion_order {
            t += &format!("torsion point of order {o}; height 0\n");
        }
        if let Some(b) = &local.breakdown {
            t += &format!("{:>8}  {:>20}  {:>14}  {:>12}  {}\n", "place", "lambda", "log_coeff", "error", "method");
            for l in b.entries.values() {
                let coeff = l.log_coeff.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "-".into());
                let method = serde_json::to_value(l.method).unwrap();
                t += &format!(
                    "{:>8}  {:>20.12}  {:>14}  {:>12.3e}  {}\n",
                    place_name(&l.place),
                    l.value,
                    coeff,
                    l.error,
                    method.as_str().unwrap()
                );
            }
        }
        t += &format!("{:>8}  {:>20.12}  {:>14}  {:>12.3e}\n", "total", local.value, "", local.error);
        if let Some(l) = &limit {
            t += &format!("{:>8}  {:>20.12}  {:>14}  {:>12.3e}\n", "limit", l.value, "", l.error);
        }
        t
    });
    Ok(Output {
        command: "nt-height",
        inputs: json!({
            "curve": [e.a.to_string(), e.b.to_string()],
            "point": [p.x().unwrap_or(&BigRational::default()).to_string(), p.y().map(|y| y.to_string())],
            "depth": depth,
            "limit_depth": if both { Some(limit_depth) } else { None },
        }),
        results,
        error_bounds: bounds,
        table,
    })
}

fn cmd_supersingular(curve_s: &str, pmax: u64, format: Format) -> Result<Output, Error> {
    if pmax > PMAX_CEILING {
        return Err(validation(format!("--pmax is capped at {PMAX_CEILING}")));
    }
    let e = curve(curve_s)?;
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for p in primes_up_to(pmax).into_iter().filter(|&p| p >= 5) {
        if reduction_type(&e, p)? != ReductionType::Good {
            bad.push(p);
            continue;
        }
        let ap = ap_count(&e, p)?;
        rows.push((p, ap, ap == 0));
    }
    let table = match format {
        Format::Json => None,
        Format::Csv => Some(rows.iter().fold("p,a_p,supersingular\n".to_string(), |acc, (p, ap, ss)| {
            acc + &format!("{p},{ap},{ss}\n")
        })),
        Format::Text => Some(rows.iter().fold(format!("{:>8} {:>8}  supersingular\n", "p", "a_p"), |acc, (p, ap, ss)| {
            acc + &format!("{p:>8} {ap:>8}  {}\n", if *ss { "yes" } else { "no" })
        })),
    };
    Ok(Output {
        command: "supersingular",
        inputs: json!({ "curve": [e.a.to_string(), e.b.to_string()], "pmax": pmax }),
        results: json!({
            "rows": rows.iter().map(|(p, ap, ss)| json!({"p": p, "a_p": ap, "supersingular": ss})).collect::<Vec<_>>(),
            "supersingular": rows.iter().filter(|r| r.2).map(|r| r.0).collect::<Vec<_>>(),
            "bad_primes": bad,
        }),
        error_bounds: json!({}),
        table,
    })
}

fn cmd_tower(p: u64, r: u32, s: u32, a: &str, samples: usize, seed: u64) -> Result<Output, Error> {
    let a_q = rational(a)?;
    let lvl = TowerLevel::new(p, r, s, &a_q)?;
    let degree = tower_degree(&lvl)?;
    let chain = descent_chain(&lvl)?;
    let sigma = sigma_action(&lvl).ok();
    let mut gaps = Vec::new();
    let mut ambiguous = 0;
    if sigma.is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = sample_monomial(&lvl, &mut rng);
            match metric_gap_check(&lvl, &x) {
                Ok(g) => gaps.push(g),
                Err(Error::Ambiguous(_)) => ambiguous += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let min_gap = gaps.iter().filter_map(|g| g.gap.clone()).min();
    let amoroso = a_q.is_integer().then(|| amoroso_condition(&a_q.to_integer(), p));
    Ok(Output {
        command: "tower",
        inputs: json!({ "p": p, "r": r, "s": s, "a": a_q.to_string(), "samples": samples, "seed": seed }),
        results: json!({
            "degree": degree,
            "lambda": lvl.lambda,
            "v_b": lvl.v_b,
            "b_divisible": lvl.b_divisible,
            "amoroso_condition": amoroso,
            "descent_chain": chain,
            "sigma": sigma,
            "metric_gap": {
                "checked": gaps.len(),
                "ambiguous": ambiguous,
                "min_gap": min_gap.map(|g| g.to_string()),
                "bound": format!("1/{}", p.pow(3)),
                "bound_ok": gaps.iter().all(|g| g.bound_ok),
            },
        }),
        error_bounds: json!({}),
        table: None,
    })
}

fn cmd_equidist(which: &Equidist) -> Result<Output, Error> {
    match which {
        Equidist::Gauss { a, p, n } => {
            let s = gauss_statistic(&rational(a)?, *p, *n)?;
            Ok(Output {
                command: "equidist gauss",
                inputs: json!({ "a": a, "p": p, "n": n }),
                error_bounds: json!({ "value": s.error }),
                results: serde_json::to_value(s).unwrap(),
                table: None,
            })
        }
        Equidist::Suz { curve: c, n, cap, depth } => {
            let e = curve(c)?;
            let s = suz_torsion_average(&e, *n, *cap, *depth)?;
            Ok(Output {
                command: "equidist suz",
                inputs: json!({ "curve": [e.a.to_string(), e.b.to_string()], "n": n, "cap": cap, "depth": depth }),
                error_bounds: json!({ "value": sig12(s.error) }),
                results: serde_json::to_value(s).unwrap(),
                table: None,
            })
        }
        Equidist::Bernoulli { grid, values } => {
            let ls = match (grid, values) {
                (Some(0), _) => return Err(validation("--grid must be at least 1")),
                (Some(n), _) => uniform_grid(*n),
                (None, Some(v)) => v.split(',').map(rational).collect::<Result<_, _>>()?,
                (None, None) => return Err(validation("give --grid N or --values l1,l2,...")),
            };
            let avg = bernoulli_uniformity(&ls)?;
            Ok(Output {
                command: "equidist bernoulli",
                inputs: json!({ "grid": grid, "values": values }),
                results: json!({ "average": sig12(rat_to_f64(&avg)), "exact": avg.to_string(), "limit": 0.0 }),
                error_bounds: json!({ "average": 0.0 }),
                table: None,
            })
        }
    }
}

fn summary_text(rep: &SurveyReport) -> String {
    let mut t = format!("{}\n\nsaturated elements\n", rep.schema_version);
    t += &format!("{:>10} {:>4} {:>4} {:>6} {:>4}  {:<28} {}\n", "u", "r", "m", "s", "deg", "height", "verdict");
    for m in &rep.sat.members {
        let (deg, verdict) = match &m.realization {
            Some(r) => (r.degree.to_string(), serde_json::to_value(&r.verdict).unwrap()["verdict"].as_str().unwrap().to_string()),
            None => ("-".into(), "symbolic".into()),
        };
        let e = &m.element;
        t += &format!("{:>10} {:>4} {:>4} {:>6} {:>4}  {:<28} {}\n", e.u, e.r, e.m, e.s, deg, m.height.to_string(), verdict);
    }
    t += "\nkummer levels\n";
    for k in &rep.kummer {
        t += &format!(
            "  ({},{}) degree {:>5}  chain {:?}  ambiguous {}  min gap {}  bound_ok {}\n",
            k.level.0,
            k.level.1,
            k.degree,
            k.chain,
            k.ambiguous,
            k.min_gap.as_ref().map(|g| g.to_string()).unwrap_or_else(|| "inf".into()),
            k.bound_ok
        );
    }
    for c in &rep.curves {
        t += &format!("\ncurve y^2 = x^3 + ({})x + ({})\n", c.a, c.b);
        let ss: Vec<u64> = c.supersingular.iter().filter(|r| r.supersingular).map(|r| r.p).collect();
        t += &format!("  supersingular {ss:?}\n");
        for tr in &c.torsion {
            t += &format!("  torsion {} order {}\n", tr.point, tr.order);
        }
        for h in &c.heights {
            t += &format!(
                "  height {}  local sum {:.12}  limit {:.12}  gap {:.3e}\n",
                h.point, h.breakdown.total, h.limit, h.mode_gap
            );
        }
        for s in &c.suz {
            t += &format!("  suz N={:>2}  average {:.12}\n", s.index, s.value);
        }
    }
    t
}

fn cmd_survey(config: &PathBuf, out: Option<&PathBuf>) -> Result<Output, Error> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| validation(format!("cannot read config {}: {e}", config.display())))?;
    let cfg = SurveyConfig::parse(&text)?;
    let rep = run_survey(&cfg)?;
    let mut results = json!({
        "members": rep.sat.members.len(),
        "all_heights_exact": rep.sat.all_heights_exact,
        "all_witnesses_ok": rep.sat.all_witnesses_ok,
        "min_member_height": rep.sat.min_member_height.as_ref().map(|h| h.to_string()),
        "metric_gaps_ok": rep.kummer.iter().all(|k| k.bound_ok),
        "curves": rep.curves.len(),
    });
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| validation(format!("cannot create {}: {e}", dir.display())))?;
            let json_path = dir.join("survey_report.json");
            let text_path = dir.join("survey_report.txt");
            let io = |e: std::io::Error| Error::Validation(format!("cannot write report: {e}"));
            std::fs::write(&json_path, rep.to_json()).map_err(io)?;
            std::fs::write(&text_path, summary_text(&rep)).map_err(io)?;
            results["report"] = json!(json_path.display().to_string());
            results["summary"] = json!(text_path.display().to_string());
        }
        None => results["report"] = serde_json::to_value(&rep).unwrap(),
    }
    Ok(Output {
        command: "survey",
        inputs: json!({ "config": config.display().to_string(), "seed": cfg.seed }),
        results,
        error_bounds: json!({}),
        table: None,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Unsupported(_) | Error::TorsionOrbit { .. } => 2,
        Error::Precision { .. } | Error::PrecisionExhausted { .. } | Error::Ambiguous(_) | Error::NoRoot(_) => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Validation(_) => "validation",
        Error::Domain(_) => "domain",
        Error::Unsupported(_) => "unsupported",
        Error::TorsionOrbit { .. } => "torsion_orbit",
        Error::Precision { .. } | Error::PrecisionExhausted { .. } => "precision",
        Error::Ambiguous(_) => "ambiguous",
        Error::NoRoot(_) => "no_root",
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Height { expr } => cmd_height(expr),
        Command::NtHeight { curve, point, both, depth, limit_depth, format } => {
            cmd_nt_height(curve, point, *both, *depth, *limit_depth, *format)
        }
        Command::Supersingular { curve, pmax, format } => cmd_supersingular(curve, *pmax, *format),
        Command::Tower { p, r, s, a, samples, seed } => cmd_tower(*p, *r, *s, a, *samples, *seed),
        Command::Equidist { which } => cmd_equidist(which),
        Command::Survey { config, out } => cmd_survey(config, out.as_ref()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Height { .. } => "height",
        Command::NtHeight { .. } => "nt-height",
        Command::Supersingular { .. } => "supersingular",
        Command::Tower { .. } => "tower",
        Command::Equidist { which: Equidist::Gauss { .. } } => "equidist gauss",
        Command::Equidist { which: Equidist::Suz { .. } } => "equidist suz",
        Command::Equidist { which: Equidist::Bernoulli { .. } } => "equidist bernoulli",
        Command::Survey { .. } => "survey",
    }
}

/// Write to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(|| run(&cli));
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(Ok(out)) => {
            if let Some(t) = out.table {
                emit(&t);
            } else {
                let env = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": out.command,
                    "inputs": out.inputs,
                    "results": out.results,
                    "error_bounds": out.error_bounds,
                    "runtime_ms": sig12(runtime_ms),
                });
                emit(&(serde_json::to_string_pretty(&env).unwrap() + "\n"));
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            let env = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command_name(&cli.command),
                "error": { "kind": error_kind(&e), "message": e.to_string() },
                "runtime_ms": sig12(runtime_ms),
            });
            emit(&(serde_json::to_string_pretty(&env).unwrap() + "\n"));
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => {
            eprintln!("error: internal assertion failed");
            ExitCode::from(4)
        }
    }
}


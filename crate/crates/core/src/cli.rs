//! Command-line frontend. Every subcommand builds a report; claims that fail
//! make the exit code 1, usage and runtime errors make it 2.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::grigorchuk::{self as grig, LcsQuotient};
use crate::guptasidki::{self as gs, GsQuotient, GuptaSidki};
use crate::quotient::{
    cache::enumerate_cached, quotient_diameter, worst_case_diameter, EnumerateOptions, FiniteGroup, FiniteQuotient,
    QuotientKind,
};
use crate::report::{Recorder, Report, RunConfig, DEFAULT_SEED};
use crate::spectra;
use crate::suite::{self, Suite, SuiteOptions};
use crate::words::{symmetrize, GeneratorWord, GroupSpec};

#[derive(Debug, Parser)]
#[command(name = "branchdiam", version, about = "Diameters, spectra and growth of branch groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Directory for enumerated quotients.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = crate::quotient::DEFAULT_MAX_ELEMENTS)]
    max_elements: usize,
    /// Largest level table built point by point.
    #[arg(long, global = true, default_value_t = crate::wreath::DEFAULT_LEAF_CAP)]
    max_leaves: u64,
    #[arg(long, global = true, default_value_t = spectra::DEFAULT_ITERATION_CAP)]
    max_iterations: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Record wall time per claim (reports stop being reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Args)]
struct Target {
    #[arg(long, default_value = "grigorchuk")]
    group: String,
    /// Quotient by the level-n stabilizer.
    #[arg(long, conflicts_with = "depth")]
    level: Option<u32>,
    /// Quotient by K^(xp^m).
    #[arg(long)]
    depth: Option<u32>,
    /// Comma-separated generator words (default: the standard generators).
    #[arg(long, value_delimiter = ',')]
    gens: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate a finite quotient.
    Quotient {
        #[command(flatten)]
        target: Target,
        /// Print only the order.
        #[arg(long)]
        order: bool,
    },
    /// Cayley diameter of a quotient.
    Diameter {
        #[command(flatten)]
        target: Target,
        /// Largest diameter over all symmetric generating sets.
        #[arg(long)]
        worst_case: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "grigorchuk")]
        group: String,
        #[arg(long, default_value_t = gs::DEFAULT_SAMPLES)]
        samples: usize,
        /// Deepest stabilizer level for order checks.
        #[arg(long, default_value_t = 4)]
        max_level: u32,
    },
    /// One cover-growth step.
    Sk {
        #[arg(long, default_value = "grigorchuk")]
        group: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = gs::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Spectral gap and mixing time of a quotient.
    Spectra {
        #[command(flatten)]
        target: Target,
        /// Print the walk trace as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Ball sizes in the infinite group.
    Growth {
        #[arg(long, default_value = "grigorchuk")]
        group: String,
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        /// Also check f(diam) >= |G/Stab(n)| at this level.
        #[arg(long)]
        check_level: Option<u32>,
    },
    /// Constants: C_p, growth exponents, the 3-group sequences.
    Constants {
        #[arg(long)]
        cp: Option<u32>,
        #[arg(long)]
        exponents: bool,
        #[arg(long)]
        sequences: Option<usize>,
        /// Print sequences as CSV.
        #[arg(long)]
        csv: bool,
    },
}

/// Runs the tool; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 2 {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(report) => {
            if let Some(path) = &cli.global.report {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            for c in report.claims.iter().filter(|c| c.status.is_failed()) {
                let _ = writeln!(err, "FAILED {}: {}", c.claim, c.witness);
            }
            i32::from(report.failed())
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn config(g: &Global, command: &str) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        group: None,
        level: None,
        depth: None,
        gens: Vec::new(),
        max_elements: g.max_elements,
        max_leaves: g.max_leaves,
        max_iterations: g.max_iterations,
        seed: g.seed,
        extra: Vec::new(),
    }
}

fn target_config(g: &Global, command: &str, t: &Target) -> RunConfig {
    let mut c = config(g, command);
    c.group = Some(t.group.clone());
    c.level = t.level;
    c.depth = t.depth;
    c.gens = t.gens.clone();
    c
}

fn parse_gens(group: GroupSpec, gens: &[String]) -> Result<Vec<GeneratorWord>> {
    gens.iter().map(|s| GeneratorWord::parse(group, s.trim())).collect()
}

fn enum_opts(g: &Global) -> EnumerateOptions {
    EnumerateOptions {
        max_elements: g.max_elements,
        max_leaves: g.max_leaves,
    }
}

fn quotient_of(g: &Global, t: &Target) -> Result<(GroupSpec, Vec<GeneratorWord>, FiniteQuotient)> {
    let group: GroupSpec = t.group.parse()?;
    let gens = parse_gens(group, &t.gens)?;
    let kind = match (t.level, t.depth) {
        (Some(n), None) => QuotientKind::LevelStabilizer(n),
        (None, Some(m)) => QuotientKind::BranchPower(m),
        _ => return Err(Error::InvalidRequest("give exactly one of --level and --depth".into())),
    };
    let q = enumerate_cached(group, &gens, kind, &enum_opts(g), g.cache_dir.as_deref())?;
    Ok((group, gens, q))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Report> {
    let g = &cli.global;
    let mut rec = Recorder::new(g.timings);
    let (cfg, result) = match &cli.command {
        Command::Quotient { target, order } => {
            let cfg = target_config(g, "quotient", target);
            let (_, _, q) = quotient_of(g, target)?;
            if *order {
                writeln!(out, "{}", q.order())?;
            }
            let r = json!({ "order": q.order(), "diameter": q.spheres().len() - 1, "spheres": q.spheres() });
            (cfg, r)
        }
        Command::Diameter { target, worst_case } => {
            let cfg = target_config(g, "diameter", target);
            let (group, gens, q) = quotient_of(g, target)?;
            let gens = if gens.is_empty() { group.standard_generators() } else { gens };
            let d = quotient_diameter(&q, &gens)?;
            let mut r = json!({ "order": q.order(), "diameter": d.diameter, "balls": d.balls });
            if *worst_case {
                r["worst_case"] = json!(worst_case_diameter(&q)?);
            }
            (cfg, r)
        }
        Command::Verify {
            suite,
            group,
            samples,
            max_level,
        } => {
            let mut cfg = config(g, "verify");
            cfg.group = Some(group.clone());
            cfg.extra = vec![
                ("suite".into(), suite.clone()),
                ("samples".into(), samples.to_string()),
                ("max_level".into(), max_level.to_string()),
            ];
            let opts = SuiteOptions {
                enumerate: enum_opts(g),
                max_leaves: g.max_leaves,
                seed: g.seed,
                samples: *samples,
                max_level: *max_level,
            };
            suite::run(group.parse()?, Suite::parse(suite)?, &opts, &mut rec)?;
            (cfg, Value::Null)
        }
        Command::Sk { group, m, samples } => {
            let mut cfg = config(g, "sk");
            cfg.group = Some(group.clone());
            cfg.extra = vec![("m".into(), format!("{m:?}")), ("samples".into(), samples.to_string())];
            sk(group.parse()?, *m, *samples, g, &mut rec)?;
            (cfg, Value::Null)
        }
        Command::Spectra { target, csv } => {
            let cfg = target_config(g, "spectra", target);
            let (group, gens, q) = quotient_of(g, target)?;
            let words = symmetrize(if gens.is_empty() { &[] } else { &gens });
            let words = if words.is_empty() { symmetrize(&group.standard_generators()) } else { words };
            let s = words.iter().map(|w| q.image(w)).collect::<Result<Vec<u32>>>()?;
            let gap = spectra::spectral_gap(&q, &s)?;
            let mix = spectra::mixing_time(&q, &s, g.max_iterations)?;
            if *csv {
                writeln!(out, "step,distance")?;
                for (l, d) in mix.trace.iter().enumerate() {
                    writeln!(out, "{l},{d:e}")?;
                }
            }
            let r = json!({
                "order": gap.order,
                "diameter": gap.diameter,
                "lambda2": gap.lambda2,
                "gap": gap.gap,
                "paper_bound": gap.lower_bound,
                "mixing_time": mix.mixing_time,
                "ratio": mix.ratio(gap.gap),
            });
            let bound = gap.bound_holds;
            rec.claim("gap lower bound", "gap >= (|S| diam^2)^-1", || {
                Ok((bound.map_or(Status::Inconclusive, Status::from_bool), json!({ "gap": gap.gap })))
            });
            rec.claim("walk distance non-increasing", "||f_l - u||_inf is non-increasing", || {
                Ok((Status::from_bool(mix.monotone), json!({ "steps": mix.mixing_time })))
            });
            (cfg, r)
        }
        Command::Growth {
            group,
            gens,
            radius,
            check_level,
        } => {
            let mut cfg = config(g, "growth");
            cfg.group = Some(group.clone());
            cfg.gens = gens.clone();
            cfg.extra = vec![("radius".into(), radius.to_string()), ("check_level".into(), format!("{check_level:?}"))];
            let spec: GroupSpec = group.parse()?;
            let words = parse_gens(spec, gens)?;
            let t = spectra::growth(spec, &words, *radius, g.max_elements)?;
            let mut r = json!({ "balls": t.balls });
            if let Some(n) = check_level {
                let c = spectra::growth_diameter_check(spec, &words, *n, &enum_opts(g))?;
                r["check"] = serde_json::to_value(&c).unwrap();
                rec.claim(&format!("growth at the diameter, level {n}"), "f(diam(F, S)) >= |F|", || {
                    Ok((c.status, json!({ "ball": c.ball_at_diameter, "order": c.order })))
                });
            }
            (cfg, r)
        }
        Command::Constants {
            cp,
            exponents,
            sequences,
            csv,
        } => {
            let mut cfg = config(g, "constants");
            cfg.extra = vec![
                ("cp".into(), format!("{cp:?}")),
                ("exponents".into(), exponents.to_string()),
                ("sequences".into(), format!("{sequences:?}")),
            ];
            let mut r = json!({});
            if let Some(p) = cp {
                let c = gs::cp(*p)?;
                writeln!(out, "{}", c.value)?;
                r["cp"] = json!({ "p": p, "value": c.value.to_string(), "closed_form": gs::cp_closed_form(*p).to_string() });
            }
            if *exponents {
                let e = spectra::growth_exponents();
                r["exponents"] = serde_json::to_value(&e).unwrap();
            }
            if let Some(n) = sequences {
                let s = gs::gs3_sequences(*n)?;
                if *csv {
                    writeln!(out, "n,alpha,beta")?;
                    for i in 0..s.alpha.len() {
                        writeln!(out, "{},{},{}", i + 1, s.alpha[i], s.beta[i])?;
                    }
                }
                let exact = s.closed_forms_exact;
                rec.claim("alpha and beta closed forms", "(1 + sqrt 2)^n", || Ok((Status::from_bool(exact), Value::Null)));
                r["sequences"] = serde_json::to_value(&s).unwrap();
            }
            (cfg, r)
        }
    };
    let mut report = Report::new(cfg);
    report.claims = rec.claims;
    report.result = result;
    let quiet = matches!(
        &cli.command,
        Command::Quotient { order: true, .. } | Command::Constants { cp: Some(_), .. } | Command::Spectra { csv: true, .. }
    ) || matches!(&cli.command, Command::Constants { csv: true, sequences: Some(_), .. });
    if !quiet {
        writeln!(out, "{}", report.to_json())?;
    }
    Ok(report)
}

fn sk(group: GroupSpec, m: Option<u32>, samples: usize, g: &Global, rec: &mut Recorder) -> Result<()> {
    let opts = enum_opts(g);
    if group.is_grigorchuk() {
        let m = m.unwrap_or(2);
        let lcs = LcsQuotient::build(&opts)?;
        let (r, x) = grig::covering_ball(&lcs, m)?;
        let rep = grig::sk_step_verify(&lcs, m, &x)?;
        rec.claim(&format!("cover growth m = {m}"), "X^35 gamma_{2^{m+1}+1} = G", || {
            let mut v = serde_json::to_value(&rep).unwrap();
            v["ball_radius"] = json!(r);
            Ok((Status::from_bool(rep.within_bound), v))
        });
        return Ok(());
    }
    let p = group.prime();
    match m.unwrap_or(if p == 3 { 1 } else { 2 }) {
        1 if p == 3 => {
            let gq = GsQuotient::build(3, 2, &opts)?;
            let (r, x) = gq.covering_ball(1)?;
            let rep = gs::sk_step_verify_gs(&gq, 1, &x)?;
            rec.claim("cover growth p = 3, m = 1", "X^{C_p} K^(xp^{m+1}) = Gamma", || {
                let mut v = serde_json::to_value(&rep).unwrap();
                v["ball_radius"] = json!(r);
                Ok((Status::from_bool(rep.within_bound), v))
            });
        }
        m if m >= 2 => {
            let model = GuptaSidki::new(p)?;
            let rep = gs::sk_components_gs(&model, m, samples, g.seed)?;
            rec.claim(&format!("cover growth components m = {m}"), "the three inclusion chains of the step", || {
                Ok((rep.status, serde_json::to_value(&rep).unwrap()))
            });
        }
        m => {
            return Err(Error::Unsupported(format!(
                "full cover growth is computed only for p = 3, m = 1; components need m >= 2, got m = {m}"
            )))
        }
    }
    Ok(())
}

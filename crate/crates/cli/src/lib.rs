//! The `derivcalc` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or a system is infeasible
//! (the report then carries the witness), 2 on usage or parse errors.

mod input;
mod report;

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use derivcalc_core::fixtures::{self, Char2Report};
use derivcalc_core::genpoly::{self, gp_degree_check, OverIdentity};
use derivcalc_core::leibniz::{self, find_defect_witness, order_exact, order_upper_check, Witness};
use derivcalc_core::reconstruct::{self, check_recurrence, fit_operator, Fit, RecurrenceCheck, RecurrenceSpec};
use derivcalc_core::sample::{Sampler, DEFAULT_SEED};
use derivcalc_core::syntax::{parse_derivation, parse_expr, parse_op, parse_word};
use derivcalc_core::{Derivation, Error, GF2Poly, MapTable, RatFunc};
use serde_json::Value;

pub use report::Report;

/// Seed variable; when set it takes precedence over `--seed`.
pub const SEED_ENV: &str = "DERIVCALC_SEED";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "derivcalc",
    version,
    about = "Exact calculus of derivations and differential operators over Q(t1..tk)"
)]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled elements (decimal or 0x-hex). DERIVCALC_SEED overrides it.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Number of variables t1..tk.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    k: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator to a field element.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Bring a composition word into canonical form.
    Normalize {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Compose two operators, LEFT o RIGHT.
    Compose {
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
    },
    /// Exact order of an operator, or a sampled order check of a table.
    Order(OrderArgs),
    /// Nested Leibniz defect of an operator.
    Defect {
        #[arg(long, allow_hyphen_values = true)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Repeat for nested defects.
        #[arg(long, required = true, allow_hyphen_values = true)]
        y: Vec<String>,
    },
    /// Generalized-polynomial degree check of D/j.
    Gpdeg(GpdegArgs),
    /// Exponent polynomial D(t^i)/t^i of an operator.
    Expoly {
        #[arg(long, allow_hyphen_values = true)]
        op: String,
    },
    /// Rebuild an operator from its values on the monomial grid.
    Reconstruct {
        /// GridValues JSON: inline, @file, or - for stdin.
        #[arg(long)]
        grid: String,
    },
    /// Fit an operator of degree <= n to a table.
    Fit {
        /// MapTable JSON: inline, @file, or - for stdin.
        #[arg(long)]
        table: String,
        #[arg(long)]
        n: u32,
        /// Exclude the identity term.
        #[arg(long)]
        require_o0: bool,
    },
    /// Check a linear recurrence c_N a_n + ... + c_0 a_(n-N) = 0.
    Recurrence {
        /// c_0,...,c_N
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        coeffs: Vec<String>,
        /// a_0,a_1,...
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        seq: Vec<String>,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "table", required_unless_present = "table")]
    op: Option<String>,
    /// MapTable JSON; checks order <= n on the table's elements.
    #[arg(long, requires = "n")]
    table: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Tuples tried when searching for a lower-bound witness.
    #[arg(long, default_value_t = 50)]
    tries: usize,
}

#[derive(Args, Debug)]
struct GpdegArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "table", required_unless_present = "table")]
    op: Option<String>,
    /// MapTable JSON for D; D/j is checked.
    #[arg(long)]
    table: Option<String>,
    /// Degree bound; -1 asks for the zero map.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    /// Increment g (repeatable); sampled when absent.
    #[arg(long = "increment", allow_hyphen_values = true)]
    increments: Vec<String>,
    /// Point x (repeatable); sampled when absent.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// How many increments and points to sample.
    #[arg(long, default_value_t = 3)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// The map on F2[x] of order two that is not a derivation.
    Char2 {
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Two nonzero derivations on Q[x] x Q[x] whose composite is zero.
    ProductRing {
        #[arg(long, default_value_t = 6)]
        max_exponent: u32,
    },
    /// A composition of n derivations has order exactly n.
    Theorem2 {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Explicit derivation (repeatable); sampled when absent.
        #[arg(long = "derivation", allow_hyphen_values = true)]
        derivations: Vec<String>,
        #[arg(long, default_value_t = 50)]
        tries: usize,
        #[arg(long, default_value_t = 5)]
        tuples: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|_| format!("invalid seed '{s}'"))
}

struct Ctx<'a> {
    k: Option<usize>,
    seed: u64,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn k(&self) -> usize {
        self.k.unwrap_or(1)
    }
}

/// A finished command: its report and whether the check it ran succeeded.
struct Outcome {
    report: Report,
    ok: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, ok: true }
    }
}

/// Run the CLI on `args` (including the program name). `env_seed` is the
/// value of `DERIVCALC_SEED`, if set.
pub fn run<I, S>(
    args: I,
    env_seed: Option<&str>,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let seed = match env_seed {
        Some(s) => match parse_seed(s) {
            Ok(v) => v,
            Err(m) => {
                report_error(err, cli.json, &format!("{SEED_ENV}: {m}"));
                return 2;
            }
        },
        None => cli.seed.unwrap_or(DEFAULT_SEED),
    };
    let mut ctx = Ctx {
        k: cli.k.map(usize::from),
        seed,
        stdin,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(o) => {
            let _ = write!(out, "{}", o.report.render(cli.json));
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            report_error(err, cli.json, &e.to_string());
            2
        }
    }
}

fn report_error(err: &mut dyn Write, json: bool, message: &str) {
    if json {
        let _ = writeln!(err, "{}", serde_json::json!({ "error": message }));
    } else {
        let _ = writeln!(err, "error: {message}");
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    let k = ctx.k();
    match cmd {
        Command::Apply { op, f } => {
            let e = parse_op(&op, k)?;
            let x = parse_expr(&f, k)?;
            let mut r = Report::new();
            r.text("operator", &e).text("input", &x).text("result", e.apply(&x)?);
            Ok(Outcome::ok(r))
        }
        Command::Normalize { word } => {
            let w = parse_word(&word, k)?;
            let e = w.normalize()?;
            let mut r = Report::new();
            r.text("operator", &e).text("degree", e.degree());
            Ok(Outcome::ok(r))
        }
        Command::Compose { left, right } => {
            let a = parse_op(&left, k)?;
            let b = parse_op(&right, k)?;
            let e = a.compose(&b)?;
            let mut r = Report::new();
            r.text("operator", &e).text("degree", e.degree());
            Ok(Outcome::ok(r))
        }
        Command::Order(args) => order(args, ctx),
        Command::Defect { op, x, y } => {
            let e = parse_op(&op, k)?;
            let x = parse_expr(&x, k)?;
            let ys = y.iter().map(|s| parse_expr(s, k)).collect::<Result<Vec<_>, _>>()?;
            let v = leibniz::nested_defect(&e, &x, &ys)?;
            let mut r = Report::new();
            r.text("operator", &e)
                .text("x", &x)
                .list("y", &ys)
                .text("defect", &v);
            Ok(Outcome::ok(r))
        }
        Command::Gpdeg(args) => gpdeg(args, ctx),
        Command::Expoly { op } => {
            let e = parse_op(&op, k)?;
            let p = genpoly::exponent_polynomial(&e);
            let mut r = Report::new();
            r.text("operator", &e)
                .text("exponent_polynomial", &p)
                .text("degree", genpoly::expoly_degree(&p));
            Ok(Outcome::ok(r))
        }
        Command::Reconstruct { grid } => {
            let text = input::read_payload(&grid, ctx.stdin)?;
            let g = input::parse_grid(&text)?;
            if let Some(k) = ctx.k.filter(|&k| k != g.nvars) {
                return Err(CliError::Usage(format!("--k {k} disagrees with grid k = {}", g.nvars)));
            }
            let mut r = Report::new();
            r.text("k", g.nvars).text("n", g.n);
            match reconstruct::reconstruct_operator(&g) {
                Ok(e) => {
                    r.put("status", "ok").text("operator", &e).text("degree", e.degree());
                    Ok(Outcome::ok(r))
                }
                Err(Error::DegreeOverflow { index, bound }) => {
                    let idx: Vec<String> = index.iter().map(u32::to_string).collect();
                    r.put("status", "degree overflow")
                        .put("index", idx.join(","))
                        .text("bound", bound);
                    Ok(Outcome { report: r, ok: false })
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Fit { table, n, require_o0 } => {
            let text = input::read_payload(&table, ctx.stdin)?;
            let t = input::parse_table(&text, k)?;
            let mut r = Report::new();
            r.text("n", n).put("require_o0", require_o0);
            match fit_operator(&t, n, require_o0)? {
                Fit::Solved { operator, nullity } => {
                    r.put("status", "solved")
                        .text("operator", &operator)
                        .text("nullity", nullity);
                    Ok(Outcome::ok(r))
                }
                Fit::Infeasible { row, element } => {
                    r.put("status", "infeasible")
                        .text("row", row)
                        .text("element", &element)
                        .text("value", t.get(&element).expect("row comes from the table"));
                    Ok(Outcome { report: r, ok: false })
                }
            }
        }
        Command::Recurrence { coeffs, seq } => {
            let parse = |v: &[String]| v.iter().map(|s| parse_expr(s, k)).collect::<Result<Vec<_>, _>>();
            let spec = RecurrenceSpec::new(parse(&coeffs)?, parse(&seq)?)?;
            let mut r = Report::new();
            r.text("order", spec.order());
            let ok = match check_recurrence(&spec) {
                RecurrenceCheck::Pass => {
                    r.put("status", "pass");
                    true
                }
                RecurrenceCheck::FailAt(i) => {
                    r.put("status", "fail").text("index", i);
                    false
                }
            };
            Ok(Outcome { report: r, ok })
        }
        Command::Demo { which } => demo(which, ctx),
    }
}

fn witness_json(w: &Witness) -> Value {
    let mut r = Report::new();
    r.text("x", &w.args[0]).list("y", &w.args[1..]).text("value", &w.value);
    r.into_value()
}

fn order(args: OrderArgs, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    let k = ctx.k();
    if let Some(table) = args.table {
        let n = args.n.expect("clap enforces --n with --table");
        let text = input::read_payload(&table, ctx.stdin)?;
        let t = input::parse_table(&text, k)?;
        let samples: Vec<RatFunc> = t.entries().iter().map(|(x, _)| x.clone()).collect();
        let check = order_upper_check(&t, n, &samples)?;
        let mut r = Report::new();
        r.text("n", n)
            .put("status", if check.passed() { "consistent" } else { "fail" })
            .text("checked", check.checked)
            .text("skipped", check.skipped);
        if let Some(v) = &check.violation {
            r.text("violation", v);
        }
        return Ok(Outcome {
            ok: check.passed(),
            report: r,
        });
    }
    let e = parse_op(args.op.as_deref().expect("clap enforces --op or --table"), k)?;
    let mut r = Report::new();
    match order_exact(&e) {
        Ok(o) => {
            r.text("order", o.order).put("zero_map", o.zero_map).text("operator", &e);
            if o.order > 0 {
                let w = find_defect_witness(&e, o.order - 1, args.tries, ctx.seed)?;
                r.put("witness", w.as_ref().map(witness_json).unwrap_or(Value::Null));
            }
            Ok(Outcome::ok(r))
        }
        Err(Error::NotInO0 { coefficient }) => {
            r.put("status", "not in O0")
                .text("operator", &e)
                .put("D(1)", coefficient);
            Ok(Outcome { report: r, ok: false })
        }
        Err(e) => Err(e.into()),
    }
}

fn sampled(s: &mut Sampler, count: usize) -> Vec<RatFunc> {
    (0..count)
        .map(|_| RatFunc::from_poly(s.nonzero_poly(2, 3)))
        .collect()
}

fn gpdeg(args: GpdegArgs, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    let k = ctx.k();
    let parse = |v: &[String]| v.iter().map(|s| parse_expr(s, k)).collect::<Result<Vec<_>, _>>();
    let mut increments = parse(&args.increments)?;
    let mut points = parse(&args.points)?;
    let mut s = Sampler::new(ctx.seed, k);
    if increments.is_empty() {
        increments = sampled(&mut s, args.samples);
    }
    if points.is_empty() {
        points = sampled(&mut s, args.samples);
    }
    let check = match (&args.op, &args.table) {
        (Some(op), _) => {
            let e = parse_op(op, k)?;
            gp_degree_check(&OverIdentity(&e), args.n, &increments, &points)?
        }
        (None, Some(table)) => {
            let text = input::read_payload(table, ctx.stdin)?;
            let t: MapTable = input::parse_table(&text, k)?;
            gp_degree_check(&OverIdentity(&t), args.n, &increments, &points)?
        }
        (None, None) => unreachable!("clap enforces --op or --table"),
    };
    let mut r = Report::new();
    r.text("n", args.n)
        .list("increments", &increments)
        .list("points", &points)
        .put("status", if check.passed() { "pass" } else { "fail" })
        .text("checked", check.checked);
    if let Some(w) = &check.witness {
        let mut wr = Report::new();
        wr.list("increments", &w.increments)
            .text("point", &w.point)
            .text("value", &w.value);
        r.put("witness", wr.into_value());
    }
    Ok(Outcome {
        ok: check.passed(),
        report: r,
    })
}

fn char2_report(c: &Char2Report) -> Report {
    let mut r = Report::new();
    r.text("D(x)", &c.d_of_x)
        .text("D(x^2)", &c.d_of_x2)
        .text("inputs", c.inputs)
        .text("max_degree", c.max_degree)
        .put("additive", c.additive)
        .put("order_at_most_two", c.order_at_most_two);
    let witness = c.derivation_witness.as_ref().map(|(x, y)| {
        let d = fixtures::char2_d;
        let mut w = Report::new();
        w.text("x", x)
            .text("y", y)
            .text("D(xy)", d(&(x * y)))
            .text("D(x)y + D(y)x", &(&d(x) * y) + &(&d(y) * x));
        w.into_value()
    });
    r.put("derivation_witness", witness.unwrap_or(Value::Null));
    r
}

fn demo(which: Demo, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match which {
        Demo::Char2 { max_degree } => {
            let c = fixtures::char2_order_check(max_degree);
            let mut r = char2_report(&c);
            // every pair of derivations fixed by d1(x), d2(x) of degree <= 2
            let images: Vec<GF2Poly> = GF2Poly::all_up_to_degree(2).collect();
            let mut pairs = 0;
            let mut power_rule = true;
            let mut collapses = true;
            for d1x in &images {
                for d2x in &images {
                    let rep = fixtures::char2_compose_check(d1x, d2x, 8);
                    pairs += 1;
                    power_rule &= rep.power_rule_holds;
                    collapses &= rep.collapses_to_derivation;
                }
            }
            let mut collapse = Report::new();
            collapse
                .text("pairs", pairs)
                .text("max_k", 8)
                .put("power_rule_holds", power_rule)
                .put("d1 o d2 is a derivation", collapses);
            r.put("collapse", collapse.into_value());
            let ok = c.additive && c.order_at_most_two && power_rule && collapses;
            Ok(Outcome { report: r, ok })
        }
        Demo::ProductRing { max_exponent } => {
            let p = fixtures::product_ring_demo(max_exponent);
            let mut r = Report::new();
            r.text("samples", p.samples)
                .put("d1_is_derivation", p.d1_is_derivation)
                .put("d2_is_derivation", p.d2_is_derivation)
                .text("d1(x, 0)", &p.d1_witness)
                .text("d2(0, x)", &p.d2_witness)
                .put("d1 o d2 is zero", p.composite_is_zero);
            let ok = p.d1_is_derivation
                && p.d2_is_derivation
                && !p.d1_witness.is_zero()
                && !p.d2_witness.is_zero()
                && p.composite_is_zero;
            Ok(Outcome { report: r, ok })
        }
        Demo::Theorem2 {
            n,
            derivations,
            tries,
            tuples,
        } => {
            let k = ctx.k.unwrap_or(2);
            let ds: Vec<Derivation> = if derivations.is_empty() {
                if n == 0 {
                    return Err(CliError::Usage("--n must be at least 1".into()));
                }
                let mut s = Sampler::new(ctx.seed, k);
                (0..n).map(|_| s.derivation()).collect()
            } else {
                derivations
                    .iter()
                    .map(|d| parse_derivation(d, k))
                    .collect::<Result<_, _>>()?
            };
            let t = fixtures::theorem2_demo(&ds, ctx.seed, tries, tuples)?;
            let mut r = Report::new();
            r.list("derivations", &ds)
                .text("n", t.n)
                .text("operator", &t.operator)
                .text("degree", t.degree)
                .text("exponent_polynomial", &t.exponent_polynomial)
                .text("expoly_degree", t.expoly_degree)
                .put(
                    "lower_witness",
                    t.lower_witness.as_ref().map(witness_json).unwrap_or(Value::Null),
                )
                .text("upper_tuples", t.upper_tuples)
                .put(
                    "upper_counterexample",
                    t.upper_counterexample.as_ref().map(witness_json).unwrap_or(Value::Null),
                )
                .put("exact_order_confirmed", t.exact_order_confirmed());
            Ok(Outcome {
                ok: t.exact_order_confirmed(),
                report: r,
            })
        }
    }
}

//! Command-line front end: argument parsing, dispatch and output.
//!
//! [`dispatch`] is pure apart from reading a config file, so tests drive it
//! directly; the binary only forwards its arguments and environment.

pub mod config;
pub mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyzeta::bases::{pbw_basis, BasisKind};
use polyzeta::bridge::{euler_even_ratio, mine_relations, run_ratios, Side};
use polyzeta::coeff::fmt_q;
use polyzeta::ncalg::{shuffle_words, stuffle_words};
use polyzeta::numeric::{validate_relations, NumericConfig};
use polyzeta::{negalog, ratseries, words, Alphabet, NCPoly, Word, Q};
use serde::Serialize;

use config::{load_config, Settings};
use render::{render_table, Format};

#[derive(Parser, Debug)]
#[command(name = "polyzeta", version, about = "Exact shuffle/stuffle algebra and relations among multiple zeta values")]
pub struct Cli {
    /// TOML configuration file (also POLYZETA_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List Lyndon words up to a grade.
    Lyndon {
        #[arg(long, value_enum, default_value_t = AlphabetArg::X)]
        alphabet: AlphabetArg,
        #[arg(long)]
        max_grade: usize,
    },
    /// Print a PBW basis and its dual.
    Basis {
        #[arg(long, value_enum, default_value_t = KindArg::Stuffle)]
        kind: KindArg,
        #[arg(long)]
        max_grade: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Multiply two words.
    Product {
        #[arg(long, value_enum, default_value_t = ProductOp::Shuffle)]
        op: ProductOp,
        #[arg(long, value_enum, default_value_t = AlphabetArg::X)]
        alphabet: AlphabetArg,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Rational series: bounded identity checks and coefficients.
    Rat {
        #[command(subcommand)]
        action: RatAction,
    },
    /// Polylogarithms and harmonic sums at nonpositive indices.
    Negalog {
        #[command(subcommand)]
        action: NegAction,
    },
    /// Mine the relations among local coordinates.
    Relations {
        #[arg(long)]
        max_weight: Option<usize>,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
    },
    /// Exact ratios zeta(2k)/pi^(2k).
    Euler {
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Also print zeta({2}^k)/pi^(2k) and zeta({3,1}^k)/pi^(4k).
        #[arg(long)]
        runs: bool,
    },
    /// Check mined relations numerically.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    pub max_weight: usize,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum RatAction {
    /// Compare two expressions coefficient-wise up to a grade.
    Check {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        up_to: usize,
    },
    /// Coefficient of one word.
    Coeff {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum NegAction {
    /// `Li⁻_w` as a polynomial in `u = 1/(1-z)`.
    Li {
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Regularized values `ζ_⧢` and `γ`.
    Reg {
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphabetArg {
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "Y", alias = "y")]
    Y,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Shuffle,
    Stuffle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOp {
    Shuffle,
    Stuffle,
    Conc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideArg {
    #[value(name = "Y", alias = "y")]
    Y,
    #[value(name = "X", alias = "x")]
    X,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    #[value(alias = "text")]
    Table,
    Json,
    Latex,
}

/// Exit status and captured streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }
}

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<polyzeta::Error> for Failure {
    fn from(e: polyzeta::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// Run one invocation. `argv[0]` is the program name; `env` holds at least
/// the `POLYZETA_*` variables.
pub fn dispatch<I, T>(argv: I, env: &BTreeMap<String, String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let settings = match load_config(cli.config.as_deref(), env) {
        Ok(s) => s,
        Err(e) => return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    match run(cli.command, &settings) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(Failure::Domain(m)) => Outcome { code: EXIT_DOMAIN, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}

fn alphabet(a: AlphabetArg) -> Alphabet {
    match a {
        AlphabetArg::X => Alphabet::X,
        AlphabetArg::Y => Alphabet::Y,
    }
}

fn lines<S: AsRef<str>>(items: impl IntoIterator<Item = S>) -> String {
    items.into_iter().map(|s| format!("{}\n", s.as_ref())).collect()
}

#[derive(Serialize)]
struct BasisEntry {
    word: String,
    #[serde(rename = "Sigma", skip_serializing_if = "Option::is_none")]
    sigma: Option<String>,
    #[serde(rename = "Pi", skip_serializing_if = "Option::is_none")]
    pi: Option<String>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    s: Option<String>,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    p: Option<String>,
}

#[derive(Serialize)]
struct NegalogJson {
    word: Vec<u8>,
    p: Vec<i64>,
    p1: i64,
    phat1: String,
}

#[derive(Serialize)]
struct CheckJson {
    side: String,
    weight: usize,
    lhs: String,
    rhs: String,
    lhs_value: f64,
    rhs_value: f64,
    residual: f64,
    bound: f64,
    pass: bool,
}

fn run(cmd: Command, settings: &Settings) -> Result<Outcome, Failure> {
    match cmd {
        Command::Lyndon { alphabet: a, max_grade } => {
            // Plain numeric order of the indices, not the alphabet order.
            let mut ws = words::lyndon_words(alphabet(a), max_grade)?;
            ws.sort_by(|u, v| u.indices().cmp(v.indices()));
            Ok(Outcome::ok(lines(ws.iter().map(|w| w.to_string()))))
        }
        Command::Basis { kind, max_grade, format } => {
            let k = match kind {
                KindArg::Shuffle => BasisKind::ShuffleX,
                KindArg::Stuffle => BasisKind::StuffleY,
            };
            let pair = pbw_basis(k, max_grade)?;
            let mut ws: Vec<&Word> = pair.lower.keys().collect();
            ws.sort_by(|u, v| (u.grade(), u.indices()).cmp(&(v.grade(), v.indices())));
            let entries: Vec<BasisEntry> = ws
                .into_iter()
                .map(|w| (w, &pair.lower[w]))
                .map(|(w, lower)| {
                    let upper = pair.upper(w).map(|p| p.to_text());
                    let lower = Some(lower.to_text());
                    match kind {
                        KindArg::Stuffle => BasisEntry { word: w.to_text(), sigma: upper, pi: lower, s: None, p: None },
                        KindArg::Shuffle => BasisEntry { word: w.to_text(), sigma: None, pi: None, s: upper, p: lower },
                    }
                })
                .collect();
            Ok(Outcome::ok(match format {
                TextFormat::Json => serde_json::to_string_pretty(&entries).expect("serialize") + "\n",
                TextFormat::Text => {
                    let (u, l) = if kind == KindArg::Stuffle { ("Sigma", "Pi") } else { ("S", "P") };
                    lines(entries.iter().map(|e| {
                        let (uv, lv) = match kind {
                            KindArg::Stuffle => (&e.sigma, &e.pi),
                            KindArg::Shuffle => (&e.s, &e.p),
                        };
                        format!(
                            "{} | {u} = {} | {l} = {}",
                            e.word,
                            uv.as_deref().unwrap_or("?"),
                            lv.as_deref().unwrap_or("?")
                        )
                    }))
                }
            }))
        }
        Command::Product { op, alphabet: a, left, right } => {
            let a = alphabet(a);
            let (u, v) = (Word::parse(a, &left)?, Word::parse(a, &right)?);
            let terms = match op {
                ProductOp::Shuffle => shuffle_words(&u, &v),
                ProductOp::Stuffle => {
                    if a != Alphabet::Y {
                        return Err(Failure::Usage("the stuffle product needs --alphabet Y".into()));
                    }
                    stuffle_words(&u, &v)
                }
                ProductOp::Conc => [(u.concat(&v), 1)].into_iter().collect(),
            };
            let p = NCPoly::from_terms(a, terms.into_iter().map(|(w, c)| (w, Q::from_integer(c.into()))));
            Ok(Outcome::ok(p.to_text() + "\n"))
        }
        Command::Rat { action } => match action {
            RatAction::Check { lhs, rhs, up_to } => {
                let (l, r) = (ratseries::parse(&lhs)?, ratseries::parse(&rhs)?);
                let eq = ratseries::equal_up_to(&l, &r, up_to)?;
                let text = format!("{} up to grade {up_to}\n", if eq { "equal" } else { "different" });
                Ok(Outcome { code: if eq { 0 } else { EXIT_DOMAIN }, stdout: text, stderr: String::new() })
            }
            RatAction::Coeff { expr, word } => {
                let e = ratseries::parse(&expr)?;
                let a = e.alphabet()?.unwrap_or(Alphabet::X);
                let w = Word::parse(a, &word)?;
                let c = ratseries::rep_of_in(&e, a)?.coefficient(&w)?;
                Ok(Outcome::ok(format!("{c}\n")))
            }
        },
        Command::Negalog { action } => {
            let (word, format, reg) = match action {
                NegAction::Li { word, format } => (word, format, false),
                NegAction::Reg { word, format } => (word, format, true),
            };
            let w = Word::parse(Alphabet::Y0, &word)?;
            let p = negalog::lineg_coeffs(&w)?;
            let p1 = negalog::zeta_sh_neg(&w)?;
            let phat1 = negalog::gamma_neg(&w)?;
            Ok(Outcome::ok(match format {
                TextFormat::Text if reg => format!("zeta_sh = {}, gamma = {}\n", fmt_q(&p1), fmt_q(&phat1)),
                TextFormat::Text => format!("{p}\n"),
                TextFormat::Json => {
                    let ints = p.integer_coeffs().ok_or_else(|| Failure::Domain("non-integer coefficients".into()))?;
                    let p1i = if p1.is_integer() { p1.to_integer().try_into().ok() } else { None };
                    let j = NegalogJson {
                        word: w.indices().to_vec(),
                        p: ints,
                        p1: p1i.ok_or_else(|| Failure::Domain("p(1) is not a machine integer".into()))?,
                        phat1: fmt_q(&phat1),
                    };
                    serde_json::to_string(&j).expect("serialize") + "\n"
                }
            }))
        }
        Command::Relations { max_weight, side, format } => {
            let n = max_weight.unwrap_or(settings.max_weight);
            if !(2..=16).contains(&n) {
                return Err(Failure::Usage(format!("--max-weight must be in 2..=16, got {n}")));
            }
            let report = mine_relations(n)?;
            let side = match side {
                SideArg::Y => Some(Side::Y),
                SideArg::X => Some(Side::X),
                SideArg::Both => None,
            };
            let format = match format {
                TableFormat::Table => Format::Table,
                TableFormat::Json => Format::Json,
                TableFormat::Latex => Format::Latex,
            };
            Ok(Outcome::ok(render_table(&report, side, format)))
        }
        Command::Euler { k, runs } => {
            let mut out = String::from(if runs {
                "k | zeta(2k)/pi^(2k) | zeta({2}^k)/pi^(2k) | zeta({3,1}^k)/pi^(4k)\n"
            } else {
                "k | zeta(2k)/pi^(2k)\n"
            });
            for i in 1..=k {
                let e = fmt_q(&euler_even_ratio(i)?);
                if runs {
                    let (a, b) = run_ratios(i)?;
                    out += &format!("{i} | {e} | {} | {}\n", fmt_q(&a), fmt_q(&b));
                } else {
                    out += &format!("{i} | {e}\n");
                }
            }
            Ok(Outcome::ok(out))
        }
        Command::Verify(args) => verify(args, settings),
    }
}

fn verify(args: VerifyArgs, settings: &Settings) -> Result<Outcome, Failure> {
    let cfg = NumericConfig {
        terms: args.terms.unwrap_or(settings.numeric.terms),
        tol: args.tol.unwrap_or(settings.numeric.tol),
        ..settings.numeric
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if !(2..=8).contains(&args.max_weight) {
        return Err(Failure::Usage(format!("--max-weight must be in 2..=8, got {}", args.max_weight)));
    }
    let report = mine_relations(args.max_weight)?;
    let checks = validate_relations(&report, args.max_weight, &cfg)?;
    let passed = checks.iter().filter(|c| c.pass).count();
    let stdout = if args.json {
        let v: Vec<CheckJson> = checks
            .iter()
            .map(|c| CheckJson {
                side: c.side.name().into(),
                weight: c.weight,
                lhs: c.lhs.basis_name(),
                rhs: c.rhs.render_with(&polyzeta::Symbol::basis_name),
                lhs_value: c.lhs_value,
                rhs_value: c.rhs_value,
                residual: c.residual,
                bound: c.bound,
                pass: c.pass,
            })
            .collect();
        serde_json::to_string_pretty(&v).expect("serialize") + "\n"
    } else {
        let mut s = lines(checks.iter().map(|c| {
            format!(
                "{} {} {} | {} -> {} | residual {:.3e} | bound {:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.side.name(),
                c.weight,
                c.lhs.basis_name(),
                render::table_rhs(&c.rhs),
                c.residual,
                c.bound
            )
        }));
        s += &format!("{passed}/{} rules within {:e} at {} terms\n", checks.len(), cfg.tol, cfg.terms);
        s
    };
    Ok(Outcome { code: if passed == checks.len() { 0 } else { EXIT_DOMAIN }, stdout, stderr: String::new() })
}

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypertower::basefields::FieldOp;
use hypertower::krasner::{at_level, hyperadd, hypersum_value_set, rational_coset_key};
use hypertower::limit::{
    limit_arith, sigma_embed, to_approximation, CoherentElement, HenselFinder,
};
use hypertower::suites::{run_suite, AnyField, RunConfig, Suite};
use hypertower::tower::project;
use hypertower::{Error, Level, ValuedField};

#[derive(Parser, Debug)]
#[command(
    name = "hypertower",
    version,
    about = "Krasner hyperfields, their tower, and its limit"
)]
struct Cli {
    #[command(flatten)]
    field: FieldArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Base field.
    #[arg(long, global = true, value_enum, default_value_t = FieldKind::Rational)]
    field: FieldKind,
    /// Residue characteristic.
    #[arg(long, global = true, default_value_t = 5)]
    p: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FieldKind {
    Rational,
    Function,
    Quadratic,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Rational => "rational",
            FieldKind::Function => "function",
            FieldKind::Quadratic => "quadratic",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Ext {
    Quadratic,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OpArg {
    Add,
    Neg,
    Mul,
    Inv,
}

impl From<OpArg> for FieldOp {
    fn from(op: OpArg) -> Self {
        match op {
            OpArg::Add => FieldOp::Add,
            OpArg::Neg => FieldOp::Neg,
            OpArg::Mul => FieldOp::Mul,
            OpArg::Inv => FieldOp::Inv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The class [x]_γ.
    Coset {
        #[arg(long)]
        gamma: i64,
        /// Element as JSON or a literal such as 1/3.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// The hypersum [x]_γ ⊞ [y]_γ as a ball.
    Hyperadd {
        #[arg(long)]
        gamma: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// ρ_{from,to}([x]_from).
    Project {
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Digits of x in the completion.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        digits: usize,
    },
    /// σ(x) for x in Q(α), α² = 1 + p, via Hensel lifting.
    Embed {
        #[arg(long, value_enum)]
        ext: Ext,
        #[arg(long, allow_hyphen_values = true, default_value = "alpha")]
        x: String,
        #[arg(long)]
        digits: usize,
    },
    /// Run a named law suite.
    Laws {
        #[arg(long)]
        suite: String,
        /// Falls back to HYPERTOWER_SEED, then 0.
        #[arg(long, env = "HYPERTOWER_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        height: u64,
        #[arg(long, default_value_t = 16)]
        precision: u32,
    },
    /// Arithmetic in the limit, read back as digits.
    LimitArith {
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: Option<String>,
        #[arg(long)]
        digits: usize,
    },
}

impl Command {
    fn config(&self) -> Value {
        match self {
            Command::Coset { gamma, x } => json!({"command": "coset", "gamma": gamma, "x": x}),
            Command::Hyperadd { gamma, x, y } => {
                json!({"command": "hyperadd", "gamma": gamma, "x": x, "y": y})
            }
            Command::Project { from, to, x } => {
                json!({"command": "project", "from": from, "to": to, "x": x})
            }
            Command::Expand { x, digits } => json!({"command": "expand", "x": x, "digits": digits}),
            Command::Embed { x, digits, .. } => {
                json!({"command": "embed", "ext": "quadratic", "x": x, "digits": digits})
            }
            Command::Laws {
                suite,
                seed,
                samples,
                height,
                precision,
            } => json!({
                "command": "laws", "suite": suite, "seed": seed, "samples": samples,
                "height": height, "precision": precision,
            }),
            Command::LimitArith {
                op,
                lhs,
                rhs,
                digits,
            } => json!({
                "command": "limit-arith", "op": FieldOp::from(*op).name(), "lhs": lhs, "rhs": rhs, "digits": digits,
            }),
        }
    }
}

enum Failure {
    Usage(String),
    Laws(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// JSON if it parses, otherwise the raw text as a JSON string.
fn element_json(raw: &str) -> Result<Value, Failure> {
    let t = raw.trim();
    match serde_json::from_str(t) {
        Ok(v) => Ok(v),
        Err(e) if t.starts_with(['{', '[', '"']) => Err(Failure::Usage(format!(
            "malformed element JSON {raw:?}: {e}"
        ))),
        Err(_) => Ok(Value::String(t.to_string())),
    }
}

fn parse_elem<F: ValuedField>(field: &F, raw: &str) -> Result<F::Elem, Failure> {
    Ok(field.elem_from_json(&element_json(raw)?)?)
}

fn level(n: i64) -> Result<Level, Failure> {
    Ok(Level::try_from(n)?)
}

fn run_field<F: ValuedField>(field: &F, cmd: &Command) -> Result<Value, Failure> {
    match cmd {
        Command::Coset { gamma, x } => {
            let c = at_level(field, parse_elem(field, x)?, level(*gamma)?);
            let mut out = c.to_json(field);
            out["value"] = c.value().to_json();
            Ok(out)
        }
        Command::Hyperadd { gamma, x, y } => {
            let g = level(*gamma)?;
            let a = at_level(field, parse_elem(field, x)?, g);
            let b = at_level(field, parse_elem(field, y)?, g);
            let s = hyperadd(field, &a, &b)?;
            let mut out = s.to_json(field);
            out["values"] = hypersum_value_set(&s).to_json();
            Ok(out)
        }
        Command::Project { from, to, x } => {
            let c = at_level(field, parse_elem(field, x)?, level(*from)?);
            let d = project(field, &c, level(*to)?)?;
            let mut out = d.to_json(field);
            out["value"] = d.value().to_json();
            Ok(out)
        }
        Command::Expand { x, digits } => {
            Ok(field.expand(&parse_elem(field, x)?, *digits)?.to_json())
        }
        Command::LimitArith {
            op,
            lhs,
            rhs,
            digits,
        } => {
            let op = FieldOp::from(*op);
            let a = CoherentElement::from_field(field, parse_elem(field, lhs)?);
            let b = match rhs {
                Some(r) => Some(CoherentElement::from_field(field, parse_elem(field, r)?)),
                None => None,
            };
            let (e, ledger) = limit_arith(op, &a, b.as_ref())?;
            let input_level = ledger.input_level_for(*digits as u32).min(u32::MAX as u64) as u32;
            Ok(json!({
                "approximation": to_approximation(&e, *digits)?.to_json(),
                "valuation": e.valuation()?.to_json(),
                "ledger": ledger.to_json(input_level),
                "provenance": e.provenance(),
            }))
        }
        Command::Embed { .. } | Command::Laws { .. } => {
            unreachable!("dispatched before field selection")
        }
    }
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let field = AnyField::new(cli.field.field.name(), cli.field.p)?;
    match &cli.command {
        Command::Laws {
            suite,
            seed,
            samples,
            height,
            precision,
        } => {
            let suite: Suite = suite.parse()?;
            let config = RunConfig {
                seed: *seed,
                samples: *samples,
                height: *height,
                precision: *precision,
            };
            let outcome = run_suite(suite, &field, &config)?;
            if outcome.pass() {
                Ok(outcome.to_json())
            } else {
                Err(Failure::Laws(outcome.to_json()))
            }
        }
        Command::Embed { x, digits, .. } => {
            let rf = Arc::new(HenselFinder::new(cli.field.p)?);
            let elem = parse_elem(&rf.ext, x)?;
            let e = sigma_embed(&elem, Arc::clone(&rf));
            let shown = (*digits).min(8) as u32;
            Ok(json!({
                "x": rf.ext.elem_to_json(&elem),
                "approximation": to_approximation(&e, *digits)?.to_json(),
                "valuation": e.valuation()?.to_json(),
                "cosets": e.to_json(shown)?["cosets"],
                "root": rf.ext.root_mod(*digits as u32).to_string(),
            }))
        }
        cmd => match &field {
            AnyField::Rational(f) => {
                let mut out = run_field(f, cmd)?;
                if let Command::Coset { gamma, x } = cmd {
                    let key = rational_coset_key(&parse_elem(f, x)?, f.p(), level(*gamma)?);
                    out["key"] =
                        json!(key.map(|(v, u)| json!({"valuation": v, "unit": u.to_string()})));
                }
                Ok(out)
            }
            AnyField::Function(f) => run_field(f, cmd),
            AnyField::Quadratic(f) => run_field(f, cmd),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut echo = cli.command.config();
    echo["field"] = json!(cli.field.field.name());
    echo["p"] = json!(cli.field.p);
    eprintln!("{echo}");
    match run(&cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(Failure::Laws(v)) => {
            println!("{v}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            println!("{}", json!({"error": msg}));
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

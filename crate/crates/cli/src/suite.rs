//! Experiment suites: a JSON config listing commands in CLI syntax, each
//! with optional assertions on its JSON output.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Value};

use groupdens::rational::{self, Rational};

use crate::commands::{self, Failure};
use crate::Cli;

/// Overrides the report directory named in the config.
pub const OUTPUT_DIR_ENV: &str = "GROUPDENS_OUTPUT_DIR";

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct SuiteConfig {
    #[serde(default = "default_name")]
    name: String,
    #[serde(default)]
    seed: u64,
    /// Report directory, relative to the config file.
    output: Option<PathBuf>,
    #[serde(default)]
    commands: Vec<SuiteCommand>,
}

fn default_name() -> String {
    "suite".into()
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct SuiteCommand {
    name: String,
    args: Vec<String>,
    #[serde(default)]
    assert: Vec<Assertion>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct Assertion {
    /// Dotted path into the output, e.g. `value` or `rows.3.holds`.
    path: String,
    op: Op,
    value: Value,
}

#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

fn lookup<'v>(v: &'v Value, path: &str) -> Option<&'v Value> {
    path.split('.').filter(|p| !p.is_empty()).try_fold(v, |cur, key| match cur {
        Value::Object(m) => m.get(key),
        Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

fn as_rational(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => rational::parse(s).ok(),
        Value::Number(n) => rational::parse(&n.to_string()).ok(),
        _ => None,
    }
}

/// Numbers and fraction strings compare as exact rationals; anything else
/// only supports `eq` and `ne`.
fn holds(actual: &Value, op: Op, expected: &Value) -> bool {
    if let (Some(a), Some(e)) = (as_rational(actual), as_rational(expected)) {
        return match op {
            Op::Eq => a == e,
            Op::Ne => a != e,
            Op::Lt => a < e,
            Op::Le => a <= e,
            Op::Gt => a > e,
            Op::Ge => a >= e,
        };
    }
    match op {
        Op::Eq => actual == expected,
        Op::Ne => actual != expected,
        _ => false,
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Runs the suite, writing one report per command and `summary.json`.
/// Returns whether every command passed.
pub fn run(config_path: &Path) -> Result<bool, Failure> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", config_path.display())))?;
    let config: SuiteConfig = serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!("{}:{}:{}: {e}", config_path.display(), e.line(), e.column()))
    })?;

    // every command must parse before anything runs
    let parsed: Vec<Cli> = config
        .commands
        .iter()
        .map(|c| {
            let argv = std::iter::once("groupdens".to_string()).chain(c.args.iter().cloned());
            Cli::try_parse_from(argv).map_err(|e| Failure::Usage(format!("command {:?}: {e}", c.name)))
        })
        .collect::<Result<_, _>>()?;

    let out_dir = match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) => PathBuf::from(d),
        None => {
            let base = config_path.parent().unwrap_or(Path::new("."));
            base.join(config.output.clone().unwrap_or_else(|| format!("{}-reports", file_stem(&config.name)).into()))
        }
    };
    fs::create_dir_all(&out_dir).map_err(|e| Failure::Usage(format!("{}: {e}", out_dir.display())))?;
    let write = |file: &str, v: &Value| {
        let path = out_dir.join(file);
        fs::write(&path, commands::pretty(v) + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    };

    let mut entries = Vec::new();
    for (i, (cmd, cli)) in config.commands.iter().zip(&parsed).enumerate() {
        let file = format!("{:03}-{}.json", i + 1, file_stem(&cmd.name));
        let (output, mut pass, error) = match commands::execute(&cli.command, config.seed) {
            Ok(out) => (out.body.to_json(), out.pass, None),
            Err(f) => {
                let output = match &f {
                    Failure::Invariant { violation, .. } => violation.clone(),
                    _ => Value::Null,
                };
                (output, false, Some(json!({ "message": f.message(), "exit_code": f.code() })))
            }
        };
        let assertions: Vec<Value> = cmd
            .assert
            .iter()
            .map(|a| {
                let actual = lookup(&output, &a.path).cloned().unwrap_or(Value::Null);
                let ok = holds(&actual, a.op, &a.value);
                pass &= ok;
                json!({ "path": a.path, "op": a.op_name(), "expected": a.value, "actual": actual, "pass": ok })
            })
            .collect();
        let report = json!({
            "name": cmd.name,
            "args": cmd.args,
            "seed": config.seed,
            "pass": pass,
            "error": error,
            "assertions": assertions,
            "output": output,
        });
        write(&file, &report)?;
        if !pass {
            eprintln!("FAIL {}: {}", cmd.name, commands::pretty(&json!({ "assertions": assertions, "error": report["error"] })));
        }
        entries.push(json!({ "name": cmd.name, "file": file, "pass": pass }));
    }

    let all_pass = entries.iter().all(|e| e["pass"] == Value::Bool(true));
    let summary = json!({
        "name": config.name,
        "seed": config.seed,
        "pass": all_pass,
        "commands": entries,
    });
    write("summary.json", &summary)?;
    crate::emit(&(commands::pretty(&summary) + "\n"));
    Ok(all_pass)
}

impl Assertion {
    fn op_name(&self) -> &'static str {
        match self.op {
            Op::Eq => "eq",
            Op::Ne => "ne",
            Op::Lt => "lt",
            Op::Le => "le",
            Op::Gt => "gt",
            Op::Ge => "ge",
        }
    }
}

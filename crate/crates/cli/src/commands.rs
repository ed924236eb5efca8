use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use groupdens::battery;
use groupdens::density::{self, DensityKind, Witness};
use groupdens::games::{self, ExtremalPattern};
use groupdens::group::{self, build_group, Group, GroupSpec, GroupSubset};
use groupdens::measure::{self, FinSuppMeasure, TranslatePattern};
use groupdens::partitions::{self, PartitionTheorem};
use groupdens::perms::{self, FinSuppPermutation, TargetDomain};
use groupdens::rational;
use groupdens::simplex::{solve_game, MatrixGame};
use groupdens::words;
use groupdens::zline::{self, ZSet};
use groupdens::Error;

use crate::{Command, DensityCmd, GameCmd, GroupCmd, MeasureCmd, PartitionsCmd, PermsCmd, WordsCmd, ZlineCmd};

pub enum Body {
    Json(Value),
    Csv(String),
}

impl Body {
    pub fn to_json(&self) -> Value {
        match self {
            Body::Json(v) => v.clone(),
            Body::Csv(s) => json!({ "csv": s }),
        }
    }
}

/// A command's output and whether every invariant it checks held.
pub struct Outcome {
    pub body: Body,
    pub pass: bool,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Size guard: exit 3.
    Guard(String),
    /// Invariant failure: exit 1.
    Invariant { message: String, violation: Value },
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Invariant { .. } => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Guard(m) | Failure::Invariant { message: m, .. } => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::SizeGuard { .. } => Failure::Guard(e.to_string()),
            Error::Certificate(_) => Failure::Invariant {
                message: e.to_string(),
                violation: json!({ "error": e.to_string() }),
            },
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn ok(v: impl Serialize) -> Res<Outcome> {
    Ok(Outcome {
        body: Body::Json(to_value(v)),
        pass: true,
    })
}

fn checked(v: impl Serialize, pass: bool) -> Res<Outcome> {
    Ok(Outcome {
        body: Body::Json(to_value(v)),
        pass,
    })
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_group(s: &str) -> Res<Group> {
    let spec: GroupSpec = s.parse()?;
    Ok(build_group(&spec)?)
}

fn parse_indices(s: &str) -> Res<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad index {t:?}"))))
        .collect()
}

fn parse_subset(g: &Group, s: &str) -> Res<GroupSubset> {
    Ok(g.subset(&parse_indices(s)?)?)
}

fn group_and_set(args: &crate::GroupSetArgs) -> Res<(Group, GroupSubset)> {
    let g = parse_group(&args.group.group)?;
    let a = parse_subset(&g, &args.set)?;
    Ok((g, a))
}

/// Inline JSON, or the contents of a file when prefixed with `@`.
fn json_arg<T: serde::de::DeserializeOwned>(s: &str) -> Res<T> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?,
        None => s.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn parse_zset(s: &str) -> Res<ZSet> {
    Ok(s.parse()?)
}

fn parse_kind(s: &str) -> Res<DensityKind> {
    Ok(s.parse()?)
}

/// Cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
fn parse_perm(s: &str) -> Res<FinSuppPermutation> {
    let bad = || usage(format!("bad permutation {s:?}"));
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner.find(')').ok_or_else(bad)?;
        let cycle: Vec<u64> = inner[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Res<_>>()?;
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
        rest = inner[close + 1..].trim_start();
    }
    // overlapping cycles compose right to left
    cycles.iter().rev().try_fold(FinSuppPermutation::identity(), |acc, c| {
        let p = FinSuppPermutation::from_cycles(std::slice::from_ref(c))?;
        Ok(perms::perm_compose(&p, &acc))
    })
}

fn parse_target(s: &str, exclude: &str) -> Res<TargetDomain> {
    let bad = || usage(format!("bad target {s:?} (expected tail:N or residue:M:R)"));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
    let mut target = match parts.as_slice() {
        ["tail", n] => TargetDomain::tail(num(n)?),
        ["residue", m, r] => TargetDomain::residue(num(m)?, num(r)?)?,
        _ => return Err(bad()),
    };
    for x in parse_indices(exclude)? {
        target.excluded.insert(x as u64);
    }
    Ok(target)
}

/// Runs one command. `default_seed` seeds sampled checks that were not
/// given an explicit seed.
pub fn execute(cmd: &Command, default_seed: u64) -> Res<Outcome> {
    match cmd {
        Command::Group(c) => group_cmd(c),
        Command::Measure(c) => measure_cmd(c),
        Command::Density(c) => density_cmd(c),
        Command::Game(c) => game_cmd(c),
        Command::Zline(c) => zline_cmd(c),
        Command::Words(c) => words_cmd(c),
        Command::Perms(c) => perms_cmd(c),
        Command::Partitions(c) => partitions_cmd(c),
        Command::VerifyAll { max_order, seed } => {
            let report = battery::verify_all(*max_order, seed.unwrap_or(default_seed))?;
            let pass = report.pass;
            checked(report, pass)
        }
        Command::Suite { .. } => Err(usage("suites cannot be nested")),
    }
}

fn group_cmd(c: &GroupCmd) -> Res<Outcome> {
    match c {
        GroupCmd::Show(g) => ok(parse_group(&g.group)?),
        GroupCmd::Validate { file } => {
            let text = fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let raw: Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}:{}:{}: {e}", file.display(), e.line(), e.column())))?;
            let table: Vec<Vec<usize>> = serde_json::from_value(raw["table"].clone())
                .map_err(|e| usage(format!("{}: table: {e}", file.display())))?;
            match group::validate_group(&table) {
                Ok(()) => ok(json!({ "valid": true, "order": table.len() })),
                Err(v) => Err(Failure::Invariant {
                    message: format!("{}: not a group", file.display()),
                    violation: json!({ "valid": false, "violation": format!("{v:?}") }),
                }),
            }
        }
        GroupCmd::Subgroup(args) => {
            let (g, a) = group_and_set(args)?;
            let h = group::subgroup_generated(&g, &a);
            ok(json!({
                "subgroup": h.to_indices(),
                "index": group::index(&g, &h)?,
                "normal": g.is_normal(&h),
            }))
        }
    }
}

fn measure_cmd(c: &MeasureCmd) -> Res<Outcome> {
    match c {
        MeasureCmd::Convolve { group, mu, nu } => {
            let g = parse_group(&group.group)?;
            let (mu, nu): (FinSuppMeasure, FinSuppMeasure) = (json_arg(mu)?, json_arg(nu)?);
            ok(measure::convolve(&g, &mu, &nu)?)
        }
        MeasureCmd::Sup { target, mu, pattern } => {
            let (g, a) = group_and_set(target)?;
            let mu: FinSuppMeasure = json_arg(mu)?;
            let pattern: TranslatePattern = serde_json::from_value(json!(pattern))
                .map_err(|_| usage(format!("bad pattern {pattern:?} (two-sided, left, right)")))?;
            let (value, at) = measure::sup_translates(&g, &mu, &a, pattern)?;
            ok(json!({ "value": rational::format(&value), "x": at.x, "y": at.y }))
        }
        MeasureCmd::Haar(g) => ok(measure::haar_uniform(&parse_group(&g.group)?)),
    }
}

fn density_cmd(c: &DensityCmd) -> Res<Outcome> {
    match c {
        DensityCmd::Exact { target, kind } => {
            let (g, a) = group_and_set(target)?;
            let v = density::density_closed_form(&g, &a, parse_kind(kind)?);
            ok(json!({ "value": rational::format(&v) }))
        }
        DensityCmd::Bruteforce { target, kind, max_witness } => {
            let (g, a) = group_and_set(target)?;
            let kind = parse_kind(kind)?;
            let bf = density::density_bruteforce(&g, &a, kind, max_witness.unwrap_or(g.order()))?;
            let closed = density::density_closed_form(&g, &a, kind);
            checked(
                json!({
                    "value": rational::format(&bf.value),
                    "witness": bf.witness,
                    "closed_form": rational::format(&closed),
                }),
                bf.value == closed,
            )
        }
        DensityCmd::Certificate { target, kind, witness } => {
            let (g, a) = group_and_set(target)?;
            let w = Witness::Set(parse_indices(witness)?);
            let cert = density::certificate_from_witness(&g, &a, w, parse_kind(kind)?)?;
            density::verify_certificate(&g, &a, &cert)?;
            ok(cert)
        }
    }
}

fn game_cmd(c: &GameCmd) -> Res<Outcome> {
    match c {
        GameCmd::Solve { game } => {
            let game: MatrixGame = json_arg(game)?;
            let sol = solve_game(&game);
            sol.verify(&game)?;
            ok(sol)
        }
        GameCmd::SigmaR(args) => {
            let (g, a) = group_and_set(args)?;
            ok(games::sigma_r_via_game(&g, &a)?)
        }
        GameCmd::Extremal { target, pattern } => {
            let (g, a) = group_and_set(target)?;
            let p: ExtremalPattern = pattern.parse()?;
            let v = games::eval_extremal(&p, &g, &a)?;
            ok(json!({ "pattern": p.to_string(), "mixed": p.is_mixed(), "value": v }))
        }
        GameCmd::Duality { max_order } => {
            let r = battery::lp_duality(*max_order)?;
            let pass = r.pass;
            checked(r, pass)
        }
    }
}

/// Default primes horizon: `10⁵`, raised to `n_kmax` when that is larger.
fn primes_horizon(kmax: usize) -> u64 {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let n: u64 = PRIMES.iter().take(kmax).product();
    n.max(100_000)
}

fn zline_cmd(c: &ZlineCmd) -> Res<Outcome> {
    match c {
        ZlineCmd::Dstar { set } => {
            let a = parse_zset(set)?;
            ok(json!({ "set": a, "value": rational::format(&zline::dstar(&a)) }))
        }
        ZlineCmd::Delta { set, eps } => {
            let a = parse_zset(set)?;
            let d = match eps {
                Some(e) => zline::delta_eps(&a, &rational::parse(e)?),
                None => zline::delta_ideal(&a),
            };
            ok(json!({ "set": a, "delta": d }))
        }
        ZlineCmd::Sumset { a, b } => {
            let (a, b) = (parse_zset(a)?, parse_zset(b)?);
            let s = zline::sumset(&a, &b)?;
            ok(json!({ "sumset": s, "dstar": rational::format(&zline::dstar(&s)) }))
        }
        ZlineCmd::Jin { a, b, len } => {
            let w = zline::jin_witness(&parse_zset(a)?, &parse_zset(b)?, *len)?;
            let pass = w.within_bound;
            checked(w, pass)
        }
        ZlineCmd::Classify { set, len } => ok(zline::classify(&parse_zset(set)?, *len)),
        ZlineCmd::Primes { kmax, horizon, json } => {
            if *kmax > zline::PRIMES_K_LIMIT {
                return Err(Failure::Guard(format!(
                    "size guard: kmax is {kmax}, limit is {}",
                    zline::PRIMES_K_LIMIT
                )));
            }
            let table = zline::primes_bound_table(*kmax, horizon.unwrap_or_else(|| primes_horizon(*kmax)))?;
            if *json {
                return ok(table);
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "n_k", "phi", "bound_num", "bound_den", "empirical_max"])
                .and_then(|()| {
                    table.rows.iter().try_for_each(|r| {
                        w.write_record([r.k as u64, r.n_k, r.phi, r.bound_num, r.bound_den, r.empirical_max].map(|x| x.to_string()))
                    })
                })
                .map_err(|e| usage(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            Ok(Outcome {
                body: Body::Csv(String::from_utf8(bytes).expect("ascii")),
                pass: true,
            })
        }
        ZlineCmd::Ip { set, k, bound } => ok(zline::ip_witness_search(&parse_zset(set)?, *k, *bound)?),
    }
}

fn words_cmd(c: &WordsCmd) -> Res<Outcome> {
    match c {
        WordsCmd::FgroupCert { n, check_len } => {
            let r = words::fgroup_nonsubadditivity_certificate(*n, *check_len)?;
            let e = &r.exhaustive;
            let pass = r.union_is_group
                && r.subadditivity_fails
                && e.agree
                && e.max_row_count_a <= 1
                && e.max_row_count_b <= 1;
            checked(r, pass)
        }
    }
}

fn perms_cmd(c: &PermsCmd) -> Res<Outcome> {
    match c {
        PermsCmd::ConjugateWitness { perms: ps, target, exclude } => {
            let s: Vec<FinSuppPermutation> = ps.iter().map(|p| parse_perm(p)).collect::<Res<_>>()?;
            let e = parse_target(target, exclude)?;
            let w = perms::conjugation_witness(&s, &e)?;
            ok(json!({
                "f": w.f,
                "f_cycles": w.f.to_string(),
                "conjugates": w.conjugates.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }))
        }
    }
}

fn partitions_cmd(c: &PartitionsCmd) -> Res<Outcome> {
    match c {
        PartitionsCmd::Verify { group, cells, theorem } => {
            let g = parse_group(&group.group)?;
            let t: PartitionTheorem = theorem.parse()?;
            let v = partitions::verify_partition_theorem(&g, *cells, t)?;
            let pass = v.pass;
            checked(v, pass)
        }
        PartitionsCmd::Odd(group) => {
            let v = partitions::odd_group_check(&parse_group(&group.group)?)?;
            let pass = v.consistent;
            checked(v, pass)
        }
        PartitionsCmd::Protasov { group, cells } => {
            let found = partitions::protasov_search(&parse_group(&group.group)?, *cells)?;
            ok(json!({ "counterexample": found }))
        }
        PartitionsCmd::Cov(args) => {
            let (g, a) = group_and_set(args)?;
            let (size, f) = partitions::cov(&g, &a)?;
            ok(json!({ "cov": size, "f": f }))
        }
        PartitionsCmd::Pack(args) => {
            let (g, a) = group_and_set(args)?;
            let (size, f) = partitions::pack(&g, &a)?;
            ok(json!({ "pack": size, "f": f }))
        }
    }
}

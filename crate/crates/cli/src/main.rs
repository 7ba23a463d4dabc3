use std::collections::{BTreeMap, HashSet};
use std::fmt::Display;
use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use schubert_core::bpd::{enumerate_bpds, validate, BpdGrid, Mode};
use schubert_core::growth::{fill_growth, jdt, structure_constants_separated, RuleOptions};
use schubert_core::insertion::{
    biword_weight, check_commutes, insert, left_insert_traced, right_insert_traced, rsk_left,
    rsk_right, unrsk_left, unrsk_right, Biletter, Biword, Side,
};
use schubert_core::perm::{
    all_mixed_chains, all_permutations, down_chain, is_k_cover, up_chain, MixedChain,
};
use schubert_core::poly::{schubert_from_longest, schubert_oracle};
use schubert_core::{Error, Permutation, Polynomial};

const DEFAULT_MAX_N: usize = 8;

#[derive(Parser)]
#[command(
    name = "schubert",
    version,
    about = "Schubert polynomials via bumpless pipe dreams"
)]
struct Cli {
    /// Skip the cheap postcondition checks.
    #[arg(long, global = true)]
    no_verify: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SideArg {
    #[arg(long)]
    left: bool,
    #[arg(long)]
    right: bool,
}

impl SideArg {
    fn side(&self) -> Side {
        if self.left {
            Side::Left
        } else {
            Side::Right
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Direction {
    #[arg(long)]
    up: bool,
    #[arg(long)]
    down: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bpd,
    Ddiff,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Monk,
    Comm,
    RskFibers,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Schubert polynomial of a permutation.
    Schubert {
        perm: String,
        #[arg(long, value_enum, default_value = "bpd")]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Insert a biword into the identity and print the grid and recording chain.
    Rsk {
        #[command(flatten)]
        side: SideArg,
        biword: String,
    },
    /// Structure constants of a separated-descent product.
    Lr {
        w: String,
        v: String,
        #[arg(long)]
        json: bool,
    },
    /// Run an exhaustive property suite over S_n.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value = "S4")]
        group: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List or count the bumpless pipe dreams of a permutation.
    Bpds {
        perm: String,
        #[arg(long, conflicts_with = "render")]
        count: bool,
        #[arg(long)]
        render: bool,
    },
    /// Insert one biletter into a grid read from a file (`-` for stdin).
    Insert {
        #[command(flatten)]
        side: SideArg,
        grid: String,
        biletter: String,
        #[arg(long)]
        trace: bool,
    },
    /// Recover the biword of a grid and recording chain.
    Unrsk {
        #[command(flatten)]
        side: SideArg,
        grid: String,
        #[arg(long)]
        chain: String,
    },
    /// Fill a growth diagram from its bottom row and right column.
    Growth {
        #[arg(long)]
        bottom: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        json: bool,
    },
    /// Left column of the diagram filled from two chains.
    Jdt {
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
    },
    /// The canonical chain ending (up) or starting (down) at a permutation.
    Chains {
        #[command(flatten)]
        direction: Direction,
        perm: String,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

fn input(msg: impl Display) -> Failure {
    Failure::Input(msg.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Internal(msg()))
    }
}

fn max_n() -> Result<usize, Failure> {
    match std::env::var("SCHUBERT_MAX_N") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| input(format!("SCHUBERT_MAX_N is not a number: {s}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn check_size(n: usize) -> Result<(), Failure> {
    let cap = max_n()?;
    if n > cap {
        return Err(input(format!("size {n} exceeds SCHUBERT_MAX_N={cap}")));
    }
    Ok(())
}

fn parse<T>(s: &str) -> Result<T, Failure>
where
    T: FromStr<Err = Error>,
{
    s.parse().map_err(Failure::from)
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    let p: Permutation = parse(s)?;
    check_size(p.size())?;
    Ok(p)
}

fn parse_chain(s: &str) -> Result<MixedChain, Failure> {
    let c: MixedChain = parse(s)?;
    check_size(c.end().size())?;
    Ok(c)
}

fn read_grid(path: &str) -> Result<BpdGrid, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| input(format!("reading {path}: {e}")))?
    };
    let g: BpdGrid = parse(text.trim())?;
    check_size(g.size())?;
    validate(&g, Mode::Plain).map_err(|v| input(format!("invalid grid: {v}")))?;
    Ok(g)
}

fn parse_group(s: &str) -> Result<usize, Failure> {
    let n: usize = s
        .strip_prefix('S')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| input(format!("group must look like S4, got {s}")))?;
    check_size(n)?;
    Ok(n)
}

fn sorted_json(v: serde_json::Value) -> String {
    // serde_json's default map is ordered by key.
    serde_json::to_string_pretty(&v).expect("values are serializable")
}

fn render_grids(grids: &[BpdGrid]) -> String {
    grids
        .iter()
        .map(|g| g.render())
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn cmd_schubert(perm: &str, method: Method, json_out: bool, verify: bool) -> Outcome {
    let w = parse_perm(perm)?;
    let by_bpd = || {
        enumerate_bpds(&w)
            .iter()
            .map(|d| d.weight())
            .sum::<Polynomial>()
    };
    let (poly, other) = match method {
        Method::Bpd => (by_bpd(), verify.then(|| schubert_oracle(&w))),
        Method::Ddiff => (schubert_oracle(&w), verify.then(by_bpd)),
    };
    if let Some(other) = other {
        ensure(poly == other, || {
            format!("pipe dreams and divided differences disagree on {w}")
        })?;
    }
    Ok(if json_out {
        sorted_json(json!({ "perm": w.to_string(), "polynomial": poly.to_json() }))
    } else {
        poly.to_string()
    })
}

fn cmd_rsk(side: Side, word: &str, verify: bool) -> Outcome {
    let q: Biword = parse(word)?;
    if let Some(k) = q.letters().iter().map(|l| l.k).max() {
        check_size(k + q.len())?;
    }
    let (d, c) = match side {
        Side::Left => rsk_left(&q)?,
        Side::Right => rsk_right(&q)?,
    };
    if verify {
        ensure(c.is_valid(), || {
            format!("recording chain {c} is not a chain of covers")
        })?;
        ensure(d.weight() == biword_weight(&q), || {
            "grid weight differs from biword weight".into()
        })?;
    }
    Ok(format!("{}\nchain: {c}", d.render()))
}

fn cmd_lr(w: &str, v: &str, json_out: bool, verify: bool) -> Outcome {
    let (w, v) = (parse_perm(w)?, parse_perm(v)?);
    let opts = RuleOptions {
        verify,
        ..RuleOptions::default()
    };
    let constants = structure_constants_separated(&w, &v, &opts)?;
    Ok(if json_out {
        let map: BTreeMap<String, u64> =
            constants.iter().map(|(u, c)| (u.to_string(), *c)).collect();
        sorted_json(json!({
            "w": w.to_string(),
            "v": v.to_string(),
            "constants": map,
            "verified_against_oracle": verify,
        }))
    } else {
        constants
            .iter()
            .map(|(u, c)| format!("{u} {c}"))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn check_monk(n: usize) -> Outcome {
    let mut maps = 0;
    for side in [Side::Left, Side::Right] {
        for pi in all_permutations(n) {
            let ds = enumerate_bpds(&pi);
            for k in 1..n {
                let mut image = HashSet::new();
                for d in &ds {
                    for a in 1..=k {
                        let e = insert(side, d, Biletter::new(a, k)?)?;
                        ensure(e.weight() == &d.weight() * &Polynomial::var(a), || {
                            format!("{side:?} insertion of {a}_{k} into {pi} breaks the weight")
                        })?;
                        ensure(image.insert(e), || {
                            format!("{side:?} insertion not injective at {pi}, k={k}")
                        })?;
                    }
                }
                let target: HashSet<BpdGrid> = pi
                    .k_covers_up(k, n + 1)
                    .iter()
                    .flat_map(enumerate_bpds)
                    .collect();
                ensure(image == target, || {
                    format!("{side:?} insertion not onto at {pi}, k={k}")
                })?;
                maps += 1;
            }
        }
    }
    Ok(format!("OK monk S{n}: {maps} bijections verified"))
}

fn check_comm(n: usize) -> Outcome {
    let (mut checked, mut outside) = (0, 0);
    for pi in all_permutations(n) {
        let desc = pi.descents();
        for d in enumerate_bpds(&pi) {
            for k in 1..=n + 1 {
                for l in 1..=k {
                    let hyp = match (desc.d1, desc.d2) {
                        (Some(d1), Some(d2)) => l <= d1 && k >= d2,
                        _ => true,
                    };
                    for a in 1..=k {
                        for b in 1..=l {
                            let (x, y) = (Biletter::new(a, k)?, Biletter::new(b, l)?);
                            let ok = check_commutes(&d, x, y);
                            if !hyp {
                                outside += usize::from(!ok);
                                continue;
                            }
                            ensure(ok, || {
                                format!("{x} and {y} do not commute on a pipe dream of {pi}")
                            })?;
                            let (_, lt) = left_insert_traced(&d, x)?;
                            ensure(
                                lt.0.iter()
                                    .all(|s| s.branch != "2b" && s.op != "cross-bump-swap"),
                                || format!("left insertion of {x} into {pi} backs up or swaps"),
                            )?;
                            let (_, rt) = right_insert_traced(&d, y)?;
                            ensure(
                                rt.0.iter()
                                    .filter(|s| s.op == "min-droop")
                                    .all(|s| s.to.1 <= s.from.1 + 1),
                                || format!("right insertion of {y} into {pi} droops too wide"),
                            )?;
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "OK comm S{n}: {checked} commuting instances, {outside} non-commuting outside the hypotheses"
    ))
}

fn check_fibers(n: usize, seed: u64) -> Outcome {
    let mut chains = 0;
    for w in all_permutations(n) {
        let ds = enumerate_bpds(&w);
        let sw = schubert_oracle(&w);
        for c in all_mixed_chains(&w) {
            for side in [Side::Left, Side::Right] {
                let mut sum = Polynomial::zero();
                let mut words = HashSet::new();
                for d in &ds {
                    let q = match side {
                        Side::Left => unrsk_left(d, &c)?,
                        Side::Right => unrsk_right(d, &c)?,
                    };
                    let back = match side {
                        Side::Left => rsk_left(&q)?,
                        Side::Right => rsk_right(&q)?,
                    };
                    ensure(back == (d.clone(), c.clone()), || {
                        format!("{side:?} roundtrip fails for {q}")
                    })?;
                    sum = &sum + &biword_weight(&q);
                    words.insert(q.to_string());
                }
                ensure(words.len() == ds.len(), || {
                    format!("{side:?} fiber of {c} has repeats")
                })?;
                ensure(sum == sw, || format!("{side:?} fiber of {c} sums to {sum}"))?;
            }
            chains += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 1000;
    for _ in 0..samples {
        let len = rng.gen_range(0..=n);
        let letters = (0..len)
            .map(|_| {
                let k = rng.gen_range(1..=n);
                Biletter::new(rng.gen_range(1..=k), k)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let q = Biword(letters);
        let (d, c) = rsk_left(&q)?;
        ensure(unrsk_left(&d, &c)? == q, || {
            format!("left roundtrip fails for {q}")
        })?;
        let (d, c) = rsk_right(&q)?;
        ensure(unrsk_right(&d, &c)? == q, || {
            format!("right roundtrip fails for {q}")
        })?;
    }
    Ok(format!(
        "OK rsk-fibers S{n}: {chains} chains on both sides, {samples} random roundtrips (seed {seed})"
    ))
}

fn check_oracle(n: usize) -> Outcome {
    let perms = all_permutations(n);
    for w in &perms {
        let sum: Polynomial = enumerate_bpds(w).iter().map(|d| d.weight()).sum();
        ensure(sum == schubert_from_longest(w), || {
            format!("pipe dream sum differs at {w}")
        })?;
    }
    Ok(format!("OK oracle S{n}: {} permutations", perms.len()))
}

fn cmd_bpds(perm: &str, count: bool) -> Outcome {
    let w = parse_perm(perm)?;
    let ds = enumerate_bpds(&w);
    Ok(if count {
        ds.len().to_string()
    } else {
        render_grids(&ds)
    })
}

fn cmd_insert(side: Side, grid: &str, letter: &str, trace: bool, verify: bool) -> Outcome {
    let d = read_grid(grid)?;
    let x: Biletter = parse(letter)?;
    check_size(d.size().max(x.k + 1))?;
    let (e, t) = match side {
        Side::Left => left_insert_traced(&d, x)?,
        Side::Right => right_insert_traced(&d, x)?,
    };
    if verify {
        let (pi, rho) = (d.perm()?, e.perm()?);
        ensure(is_k_cover(&pi, &rho, x.k), || {
            format!("{rho} is not a {}-cover of {pi}", x.k)
        })?;
        ensure(e.weight() == &d.weight() * &Polynomial::var(x.b), || {
            "insertion breaks the weight".into()
        })?;
    }
    Ok(if trace {
        format!("{t}\n{}", e.render())
    } else {
        e.render()
    })
}

fn cmd_unrsk(side: Side, grid: &str, chain: &str, verify: bool) -> Outcome {
    let d = read_grid(grid)?;
    let c = parse_chain(chain)?;
    let q = match side {
        Side::Left => unrsk_left(&d, &c)?,
        Side::Right => unrsk_right(&d, &c)?,
    };
    if verify {
        ensure(d.weight() == biword_weight(&q), || {
            "biword weight differs from grid weight".into()
        })?;
    }
    Ok(q.to_string())
}

fn run(cli: Cli) -> Outcome {
    let verify = !cli.no_verify;
    match cli.command {
        Command::Schubert { perm, method, json } => cmd_schubert(&perm, method, json, verify),
        Command::Rsk { side, biword } => cmd_rsk(side.side(), &biword, verify),
        Command::Lr { w, v, json } => cmd_lr(&w, &v, json, verify),
        Command::Check { suite, group, seed } => {
            let n = parse_group(&group)?;
            match suite {
                Suite::Monk => check_monk(n),
                Suite::Comm => check_comm(n),
                Suite::RskFibers => check_fibers(n, seed),
                Suite::Oracle => check_oracle(n),
            }
        }
        Command::Bpds { perm, count, .. } => cmd_bpds(&perm, count),
        Command::Insert {
            side,
            grid,
            biletter,
            trace,
        } => cmd_insert(side.side(), &grid, &biletter, trace, verify),
        Command::Unrsk { side, grid, chain } => cmd_unrsk(side.side(), &grid, &chain, verify),
        Command::Growth {
            bottom,
            right,
            json,
        } => {
            let g = fill_growth(&parse_chain(&bottom)?, &parse_chain(&right)?)?;
            Ok(if json {
                sorted_json(g.to_json())
            } else {
                g.to_tsv()
            })
        }
        Command::Jdt { c, d } => Ok(jdt(&parse_chain(&c)?, &parse_chain(&d)?)?.to_string()),
        Command::Chains { direction, perm } => {
            let w = parse_perm(&perm)?;
            Ok(if direction.up {
                up_chain(&w)
            } else {
                down_chain(&w)
            }
            .to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are input errors; help and version go to stdout with status 0.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

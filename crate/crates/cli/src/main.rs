use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spg_core::bench::{records_to_csv, records_to_jsonl};
use spg_core::io::strategy_player;
use spg_core::quali::profile_count;
use spg_core::rational::{format_decimal, format_exact, parse_rational};
use spg_core::{
    andersson_delta, battlefield, bench_run, block_game, brute_force_with, build_gadget, example_pe, example_px,
    induced_mc, induced_mdp, main_solve_with, mc_parity_value, mdp_parity_value, oracle_solve_with, parse_game,
    parse_strategy, quali_solve_with, random_game, reach_solve_with, serialize_game, serialize_strategy, Error, Game,
    GenSpec, Kind, Mode, Owner, Player, SolveOptions, SolveReport, SolverId, ValueVector,
};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

/// Writes to stdout; a closed pipe (`spg solve g.mpg | head`) ends the process quietly.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(EXIT_USAGE.into());
    }
}

macro_rules! outln {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

#[derive(Parser)]
#[command(name = "spg", version, about = "Exact solver for stochastic parity games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Main,
    Oracle,
    Brute,
}

#[derive(Subcommand)]
enum Command {
    /// Compute exact values and optimal strategies.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "main")]
        engine: Engine,
        /// Write values as JSON.
        #[arg(long)]
        values_out: Option<PathBuf>,
        /// Write the Player 0 strategy.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
        /// Write the Player 1 strategy.
        #[arg(long)]
        strategy1_out: Option<PathBuf>,
        /// Print the steps of the main solver.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_parser = humantime::parse_duration)]
        timeout: Option<Duration>,
    },
    /// Compute the almost-sure winning regions.
    Quali {
        file: PathBuf,
        #[arg(long, value_parser = humantime::parse_duration)]
        timeout: Option<Duration>,
    },
    /// Values under a fixed strategy, against a best response or a second strategy.
    Evaluate {
        file: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
        /// Owner of `--strategy` (0 or 1) when the file does not reveal it.
        #[arg(long)]
        player: Option<u8>,
    },
    /// Write the reachability gadget of a parity game.
    Reduce {
        file: PathBuf,
        /// Detour probability base; defaults to the closed-form bound.
        #[arg(long)]
        delta: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a game.
    Generate {
        /// JSON generator spec.
        #[arg(long, group = "source")]
        spec: Option<PathBuf>,
        /// `n,bullets,p_destr,objective`, e.g. `7,1,1/2,reach_zone1`.
        #[arg(long, group = "source")]
        battlefield: Option<String>,
        /// `pe` or `px`.
        #[arg(long, group = "source")]
        example: Option<String>,
        /// `seed,blocks,block_size`.
        #[arg(long, group = "source")]
        blocks: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run solvers over every `.mpg` file in a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "main,oracle")]
        solvers: String,
        #[arg(long, value_parser = humantime::parse_duration, default_value = "30s")]
        timeout: Duration,
        /// CSV report.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Additional JSON-lines report.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// Compare the main solver against the oracles.
    Verify {
        file: PathBuf,
        #[arg(long, value_parser = humantime::parse_duration)]
        timeout: Option<Duration>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_parse() {
            EXIT_PARSE
        } else if e.is_validation() {
            EXIT_VALIDATION
        } else if matches!(e, Error::Timeout) {
            EXIT_TIMEOUT
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<Game, Failure> {
    let text = read(path)?;
    parse_game(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn options(timeout: Option<Duration>) -> SolveOptions {
    match timeout {
        Some(t) => SolveOptions::default().with_timeout(t),
        None => SolveOptions::default(),
    }
}

fn print_values(g: &Game, values: &ValueVector) {
    for (v, x) in values.iter().enumerate() {
        outln!("{} = {} ({})", g.label(v), format_exact(x), format_decimal(x, 10));
    }
}

fn values_json(g: &Game, values: &ValueVector) -> String {
    let rows: Vec<_> = values
        .iter()
        .enumerate()
        .map(|(v, x)| {
            json!({
                "vertex": v,
                "name": g.name(v),
                "exact": format_exact(x),
                "decimal": format_decimal(x, 10),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "values": rows, "digest": values.digest() })).expect("json") + "\n"
}

fn cmd_solve(
    file: &Path,
    engine: Engine,
    values_out: Option<&Path>,
    strategy_out: Option<&Path>,
    strategy1_out: Option<&Path>,
    trace: bool,
    timeout: Option<Duration>,
) -> CmdResult {
    let g = load(file)?;
    let mut opts = options(timeout);
    if trace {
        opts = opts.with_trace();
    }
    let report = if g.kind() == Kind::Reach {
        if !matches!(engine, Engine::Main) {
            return Err(usage("only the main engine solves reachability games"));
        }
        let target = g.target().expect("validated").clone();
        let r = reach_solve_with(&g, &target, &opts)?;
        SolveReport {
            values: r.values,
            strategy0: r.strategy0,
            strategy1: r.strategy1,
            outer_iterations: r.iterations + 1,
            profitable_rounds: r.iterations,
            neutral_rounds: 0,
            trace: None,
        }
    } else {
        match engine {
            Engine::Main => main_solve_with(&g, &opts)?,
            Engine::Oracle => oracle_solve_with(&g, &opts)?,
            Engine::Brute => {
                let b = brute_force_with(&g, &opts)?;
                if b.flagged {
                    eprintln!("warning: no single Player 0 strategy is optimal everywhere; strategies are optimal at vertex 0");
                }
                SolveReport {
                    values: b.values,
                    strategy0: b.strategy0,
                    strategy1: b.strategy1,
                    outer_iterations: 0,
                    profitable_rounds: 0,
                    neutral_rounds: 0,
                    trace: None,
                }
            }
        }
    };
    if let Some(events) = &report.trace {
        for e in events {
            outln!("# {}", e.render(&g));
        }
    }
    print_values(&g, &report.values);
    if let Some(p) = values_out {
        write(p, &values_json(&g, &report.values))?;
    }
    if let Some(p) = strategy_out {
        write(p, &serialize_strategy(&report.strategy0))?;
    }
    if let Some(p) = strategy1_out {
        write(p, &serialize_strategy(&report.strategy1))?;
    }
    Ok(())
}

fn cmd_quali(file: &Path, timeout: Option<Duration>) -> CmdResult {
    let g = load(file)?;
    let q = quali_solve_with(&g, &options(timeout))?;
    let show = |ids: Vec<usize>| ids.iter().map(|&v| g.label(v)).collect::<Vec<_>>().join(" ");
    outln!("W0: {}", show(q.w0.to_vec()));
    outln!("W1: {}", show(q.w1.to_vec()));
    for (v, w) in q.witness.pairs() {
        outln!("witness {} -> {}", g.label(v), g.label(w));
    }
    Ok(())
}

fn infer_player(text: &str, g: &Game, flag: Option<u8>) -> std::result::Result<Player, Failure> {
    match flag {
        Some(0) => return Ok(Player::P0),
        Some(1) => return Ok(Player::P1),
        Some(p) => return Err(usage(format!("unknown player {p}"))),
        None => {}
    }
    if let Some(p) = strategy_player(text, g) {
        return Ok(p);
    }
    match (g.has_owner(Owner::P0), g.has_owner(Owner::P1)) {
        (false, _) => Ok(Player::P0),
        (true, false) => Ok(Player::P1),
        _ => Err(usage("cannot tell whose strategy this is; pass --player")),
    }
}

fn cmd_evaluate(file: &Path, strategy: &Path, against: Option<&Path>, player: Option<u8>) -> CmdResult {
    let g = load(file)?;
    if g.kind() != Kind::Parity {
        return Err(usage("evaluate needs a parity game"));
    }
    let text = read(strategy)?;
    let p = infer_player(&text, &g, player)?;
    let f = parse_strategy(&text, &g, p)?;
    let values = match against {
        Some(path) => {
            let other = parse_strategy(&read(path)?, &g, p.opponent())?;
            let (f0, f1) = if p == Player::P0 { (f, other) } else { (other, f) };
            mc_parity_value(&induced_mc(&g, &f0, &f1)?)?
        }
        None => {
            let mode = if p == Player::P0 {
                Mode::Minimize
            } else {
                Mode::Maximize
            };
            mdp_parity_value(&induced_mdp(&g, &f)?, mode)?.0
        }
    };
    print_values(&g, &values);
    Ok(())
}

fn cmd_reduce(file: &Path, delta: Option<&str>, output: &Path) -> CmdResult {
    let g = load(file)?;
    let delta = match delta {
        Some(d) => parse_rational(d).ok_or_else(|| usage(format!("bad delta {d:?}")))?,
        None => andersson_delta(&g),
    };
    let gg = build_gadget(&g, &delta)?;
    write(output, &serialize_game(&gg.game))
}

fn split_params(s: &str, n: usize, what: &str) -> std::result::Result<Vec<String>, Failure> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_owned()).collect();
    if parts.len() != n {
        return Err(usage(format!("{what} expects {n} comma-separated values")));
    }
    Ok(parts)
}

fn num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, Failure> {
    s.parse().map_err(|_| usage(format!("not a number: {s:?}")))
}

fn cmd_generate(
    spec: Option<&Path>,
    battle: Option<&str>,
    example: Option<&str>,
    blocks: Option<&str>,
    output: Option<&Path>,
) -> CmdResult {
    let g = if let Some(path) = spec {
        let spec: GenSpec = serde_json::from_str(&read(path)?).map_err(|e| usage(format!("spec: {e}")))?;
        random_game(&spec)?
    } else if let Some(b) = battle {
        let p = split_params(b, 4, "--battlefield")?;
        let prob = parse_rational(&p[2]).ok_or_else(|| usage(format!("bad probability {:?}", p[2])))?;
        battlefield(num(&p[0])?, num(&p[1])?, &prob, p[3].parse()?)?
    } else if let Some(e) = example {
        match e {
            "pe" => example_pe(),
            "px" => example_px(),
            _ => return Err(usage(format!("unknown example {e:?}"))),
        }
    } else if let Some(b) = blocks {
        let p = split_params(b, 3, "--blocks")?;
        block_game(num(&p[0])?, num(&p[1])?, num(&p[2])?)?
    } else {
        return Err(usage("one of --spec, --battlefield, --example or --blocks is required"));
    };
    let text = serialize_game(&g);
    match output {
        Some(p) => write(p, &text),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

fn cmd_bench(dir: &Path, solvers: &str, timeout: Duration, output: Option<&Path>, jsonl: Option<&Path>) -> CmdResult {
    let solvers = solvers
        .split(',')
        .map(|s| s.trim().parse::<SolverId>())
        .collect::<spg_core::Result<Vec<_>>>()?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mpg"))
        .collect();
    paths.sort();
    let mut games = Vec::with_capacity(paths.len());
    for p in &paths {
        let name = p
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        games.push((name, load(p)?));
    }
    let records = bench_run(&games, &solvers, timeout);
    let csv = records_to_csv(&records);
    match output {
        Some(p) => write(p, &csv)?,
        None => emit(&csv),
    }
    if let Some(p) = jsonl {
        write(p, &records_to_jsonl(&records))?;
    }
    Ok(())
}

fn cmd_verify(file: &Path, timeout: Option<Duration>) -> CmdResult {
    let g = load(file)?;
    if g.kind() != Kind::Parity {
        return Err(usage("verify needs a parity game"));
    }
    let opts = options(timeout);
    let main = main_solve_with(&g, &opts)?;
    let mut references: Vec<(&str, ValueVector)> = Vec::new();
    if profile_count(&g) <= opts.brute_cap {
        references.push(("brute", brute_force_with(&g, &opts)?.values));
    }
    if g.num_vertices() <= opts.reduction_cap {
        references.push(("oracle", oracle_solve_with(&g, &opts)?.values));
    }
    if references.is_empty() {
        outln!("no oracle applies to a game of this size; main solver finished");
        return Ok(());
    }
    for (name, values) in &references {
        if let Some(v) = (0..g.num_vertices()).find(|&v| values[v] != main.values[v]) {
            return Err(Failure {
                code: EXIT_MISMATCH,
                message: format!(
                    "mismatch at {}: main {} vs {name} {}",
                    g.label(v),
                    format_exact(&main.values[v]),
                    format_exact(&values[v])
                ),
            });
        }
    }
    let names: Vec<&str> = references.iter().map(|(n, _)| *n).collect();
    outln!("ok: main agrees with {} ({})", names.join(", "), main.values.digest());
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Solve {
            file,
            engine,
            values_out,
            strategy_out,
            strategy1_out,
            trace,
            timeout,
        } => cmd_solve(
            &file,
            engine,
            values_out.as_deref(),
            strategy_out.as_deref(),
            strategy1_out.as_deref(),
            trace,
            timeout,
        ),
        Command::Quali { file, timeout } => cmd_quali(&file, timeout),
        Command::Evaluate {
            file,
            strategy,
            against,
            player,
        } => cmd_evaluate(&file, &strategy, against.as_deref(), player),
        Command::Reduce { file, delta, output } => cmd_reduce(&file, delta.as_deref(), &output),
        Command::Generate {
            spec,
            battlefield,
            example,
            blocks,
            output,
        } => cmd_generate(
            spec.as_deref(),
            battlefield.as_deref(),
            example.as_deref(),
            blocks.as_deref(),
            output.as_deref(),
        ),
        Command::Bench {
            dir,
            solvers,
            timeout,
            output,
            jsonl,
        } => cmd_bench(&dir, &solvers, timeout, output.as_deref(), jsonl.as_deref()),
        Command::Verify { file, timeout } => cmd_verify(&file, timeout),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::Timeout).code, EXIT_TIMEOUT);
        assert_eq!(Failure::from(Error::SinkVertex(0)).code, EXIT_VALIDATION);
        let parse = Error::Parse {
            line: 1,
            reason: String::new(),
        };
        assert_eq!(Failure::from(parse).code, EXIT_PARSE);
    }
}

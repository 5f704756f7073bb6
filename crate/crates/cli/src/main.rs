//! `actorgame`: parse, interpret, explore and test actor processes.
//!
//! Exit codes: 0 success or equivalent, 1 failed or distinguished,
//! 2 usage or input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use actorgame::arena::{compose, seed, to_dot, Diagram, MoveKind, Play};
use actorgame::fairtest::{eq_check, gen_tests_capped, passes, BotMode, EqOutcome, FairOptions, Side, Test, Verdict};
use actorgame::lts::{
    closed_world_steps, process_lts, strategy_lts, weak_bisim, BisimResult, GameState, LtsGraph, LtsOptions, World,
};
use actorgame::strategy::interpret;
use actorgame::term::{parse_checked, Program};
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "actorgame", version, about = "Game semantics and fair testing for an actor calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a file, then pretty-print it.
    Parse { path: PathBuf },
    /// Print the strategy interpreting a file.
    Interp { path: PathBuf },
    /// Print the transition system of a file.
    Lts {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = WorldArg::Closed)]
        world: WorldArg,
        #[arg(long, value_enum, default_value_t = SideArg::Process)]
        side: SideArg,
        /// Emit link edges (interface world only).
        #[arg(long)]
        link: bool,
    },
    /// Run a subject against one test or a generated suite.
    Fair {
        subject: PathBuf,
        #[command(flatten)]
        suite: SuiteArgs,
        /// Test file to run instead of a generated suite.
        #[arg(long, conflicts_with = "gen")]
        test: Option<PathBuf>,
        /// Map from subject channels to test channels, e.g. `1,1`.
        #[arg(long, requires = "test", value_delimiter = ',')]
        map: Option<Vec<u32>>,
    },
    /// Compare two files on a generated suite or by weak bisimulation.
    Eq {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        suite: SuiteArgs,
        /// Decide weak bisimilarity of the interface transition systems.
        #[arg(long, conflicts_with = "gen")]
        bisim: bool,
        /// Emit link edges when comparing by bisimulation.
        #[arg(long, requires = "bisim")]
        link: bool,
    },
    /// Render a position, move or play as DOT.
    Dot {
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = WhatArg::Position)]
        what: WhatArg,
        /// Render this seed instead of a file, e.g. `tau(1,1,2,1,2)`.
        #[arg(long)]
        seed_kind: Option<MoveKind>,
    },
}

#[derive(clap::Args)]
struct SuiteArgs {
    /// Depth of the generated test processes.
    #[arg(long)]
    gen: Option<usize>,
    /// Largest sum in the generated test processes.
    #[arg(long, default_value_t = 2)]
    width: usize,
    /// Largest generated test, in prefix and parallel nodes.
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, value_enum, default_value_t = BotArg::Weak)]
    bot: BotArg,
    #[arg(long, value_enum, default_value_t = SideArg::Process)]
    side: SideArg,
    /// Shuffle the suite with this seed; test numbers keep suite order.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorldArg {
    Closed,
    Interface,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Process,
    Strategy,
}

#[derive(Clone, Copy, ValueEnum)]
enum BotArg {
    Weak,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhatArg {
    Position,
    Move,
    Play,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Process => Side::Process,
            SideArg::Strategy => Side::Strategy,
        }
    }
}

impl SuiteArgs {
    fn options(&self) -> FairOptions {
        FairOptions {
            side: self.side.into(),
            bot: match self.bot {
                BotArg::Weak => BotMode::Weak,
                BotArg::Strict => BotMode::Strict,
            },
        }
    }

    /// Numbered suite, possibly shuffled.
    fn suite(&self, gamma: u32, depth: usize) -> Vec<(usize, Test)> {
        let mut suite: Vec<_> = gen_tests_capped(gamma, depth, self.width, self.max_size)
            .into_iter()
            .enumerate()
            .collect();
        if let Some(s) = self.seed {
            suite.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        }
        suite
    }
}

/// An error reported on stderr with exit code 2.
struct InputError(String);

type Outcome = Result<(String, bool), InputError>;

fn load(path: &Path) -> Result<Program, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_checked(&text).map_err(|e| InputError(format!("{}:{e}", path.display())))
}

fn graph(prog: &Program, side: SideArg, opts: LtsOptions) -> Result<LtsGraph, InputError> {
    match side {
        SideArg::Process => process_lts(&prog.process, prog.gamma, opts).map_err(|e| InputError(e.to_string())),
        SideArg::Strategy => {
            let d = interpret(&prog.process, prog.gamma).map_err(|e| InputError(e.to_string()))?;
            Ok(strategy_lts(&d, opts))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Parse { path } => Ok((format!("{}\n", load(&path)?), true)),
        Command::Interp { path } => {
            let prog = load(&path)?;
            let d = interpret(&prog.process, prog.gamma).map_err(|e| InputError(e.to_string()))?;
            Ok((d.dump(), true))
        }
        Command::Lts { path, world, side, link } => {
            let prog = load(&path)?;
            let opts = LtsOptions {
                world: match world {
                    WorldArg::Closed => World::Closed,
                    WorldArg::Interface => World::Interface,
                },
                enable_link: link,
            };
            Ok((graph(&prog, side, opts)?.dump(), true))
        }
        Command::Fair {
            subject,
            suite,
            test,
            map,
        } => fair(&subject, &suite, test.as_deref(), map),
        Command::Eq {
            left,
            right,
            suite,
            bisim,
            link,
        } => eq(&left, &right, &suite, bisim, link),
        Command::Dot { path, what, seed_kind } => dot(path.as_deref(), what, seed_kind),
    }
}

fn fair(subject: &Path, args: &SuiteArgs, test: Option<&Path>, map: Option<Vec<u32>>) -> Outcome {
    let prog = load(subject)?;
    let suite = match (test, args.gen) {
        (Some(t), _) => {
            let tp = load(t)?;
            let h = map.unwrap_or_else(|| (1..=prog.gamma).collect());
            vec![(
                0,
                Test {
                    gamma: tp.gamma,
                    h,
                    process: tp.process,
                },
            )]
        }
        (None, Some(depth)) => args.suite(prog.gamma, depth),
        (None, None) => return Err(InputError("one of --test or --gen is required".into())),
    };
    let opts = args.options();
    let mut out = String::new();
    // Lowest failing index, whatever the print order.
    let mut first_fail = None;
    for (k, t) in &suite {
        let v = passes(&prog.process, prog.gamma, t, opts).map_err(|e| InputError(e.to_string()))?;
        match &v {
            Verdict::Pass => {
                let _ = writeln!(out, "test#{k} pass");
            }
            Verdict::Fail(w) => {
                let _ = writeln!(out, "test#{k} fail witness: {w}");
                first_fail = Some(first_fail.map_or(*k, |f: usize| f.min(*k)));
            }
        }
    }
    match first_fail {
        None => {
            out.push_str("RESULT pass\n");
            Ok((out, true))
        }
        Some(k) => {
            let _ = writeln!(out, "RESULT fail test#{k}");
            Ok((out, false))
        }
    }
}

fn eq(left: &Path, right: &Path, args: &SuiteArgs, bisim: bool, link: bool) -> Outcome {
    let p = load(left)?;
    let q = load(right)?;
    if p.gamma != q.gamma {
        return Err(InputError(format!(
            "contexts differ: {} declares {}, {} declares {}",
            left.display(),
            p.gamma,
            right.display(),
            q.gamma
        )));
    }
    if bisim {
        let opts = LtsOptions {
            world: World::Interface,
            enable_link: link,
        };
        let a = graph(&p, args.side, opts)?;
        let b = graph(&q, args.side, opts)?;
        return Ok(match weak_bisim(&a, &b) {
            BisimResult::Equivalent => ("RESULT equivalent\n".into(), true),
            BisimResult::Distinguished(c) => (format!("RESULT distinguished trace {c}\n"), false),
        });
    }
    let Some(depth) = args.gen else {
        return Err(InputError("one of --gen or --bisim is required".into()));
    };
    let numbered = args.suite(p.gamma, depth);
    let tests: Vec<Test> = numbered.iter().map(|(_, t)| t.clone()).collect();
    let outcome = eq_check(&p.process, &q.process, p.gamma, &tests, args.options()).map_err(|e| InputError(e.to_string()))?;
    Ok(match outcome {
        EqOutcome::EquivalentOnSuite => (
            format!("suite {} tests\nRESULT equivalent-on-suite\n", tests.len()),
            true,
        ),
        EqOutcome::Distinguished { index, left, right } => {
            let (k, t) = &numbered[index];
            (
                format!(
                    "suite {} tests\ntest#{k} {t}\nleft {left}\nright {right}\nRESULT distinguished test#{k}\n",
                    tests.len()
                ),
                false,
            )
        }
    })
}

fn dot(path: Option<&Path>, what: WhatArg, kind: Option<MoveKind>) -> Outcome {
    if let Some(k) = kind {
        let m = seed(k).map_err(|e| InputError(e.to_string()))?;
        let text = match what {
            WhatArg::Position => to_dot(Diagram::Position(m.initial())),
            WhatArg::Move => to_dot(Diagram::Move(&m)),
            WhatArg::Play => to_dot(Diagram::Play(&Play::from_move(&m))),
        };
        return Ok((text, true));
    }
    let Some(path) = path else {
        return Err(InputError("a file or --seed-kind is required".into()));
    };
    let prog = load(path)?;
    let d = interpret(&prog.process, prog.gamma).map_err(|e| InputError(e.to_string()))?;
    let start = GameState::representable(&d);
    let text = match what {
        WhatArg::Position => to_dot(Diagram::Position(start.position())),
        WhatArg::Move => match closed_world_steps(&start).into_iter().next() {
            Some((m, _)) => to_dot(Diagram::Move(&m)),
            None => return Err(InputError(format!("{}: no closed-world move", path.display()))),
        },
        WhatArg::Play => {
            // First successor at every step until the state is stuck.
            let mut play = Play::identity(start.position());
            let mut state = start;
            while let Some((m, next)) = closed_world_steps(&state).into_iter().next() {
                play = compose(&Play::from_move(&m), &play).map_err(|e| InputError(e.to_string()))?;
                state = next;
            }
            to_dot(Diagram::Play(&play))
        }
    };
    Ok((text, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, success)) => {
            print!("{text}");
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

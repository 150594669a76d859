use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use brainsim::config::MultiMatchPolicy;
use brainsim::memory::{Bus, FIELD_WIDTH};
use brainsim::nanocode::{self, NanoProgram};
use brainsim::orchestrator::{load_scenario, World};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "brainsim",
    version,
    about = "Associative memory and nanocode simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Multiple-match policy: first, sequential or importance_max.
    #[arg(long)]
    policy: Option<MultiMatchPolicy>,
    /// Admit recalls regardless of the repression limit.
    #[arg(long)]
    dream: bool,
    /// Let the cue editor also try removing pairs of cues.
    #[arg(long)]
    pair_removal: bool,
    /// Reverse every recalled left/right turn.
    #[arg(long)]
    backtrack: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and print its trace.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value_t = 10)]
        ticks: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a scenario one tick per newline; `q` or end of input stops.
    Step {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Dump a loaded scenario.
    Inspect { scenario: PathBuf },
    /// Assemble a nanocode file and print it in canonical form.
    NanoAssemble { file: PathBuf },
    /// Check every operation of a nanocode file for reversibility.
    NanoVerify {
        file: PathBuf,
        /// Bus width in bits; defaults to the smallest whole number of fields covering every bit used.
        #[arg(long)]
        bus_width: Option<usize>,
    },
    /// Run a nanocode file on a bus and print the final bus.
    NanoRun {
        file: PathBuf,
        /// Initial bus, fields in order, each MSB first; `_` separators are ignored.
        #[arg(long)]
        bus: String,
    },
    /// Print the reverse of a nanocode file.
    NanoReverse { file: PathBuf },
    /// Check run-then-reverse on random programs and bus states.
    NanoFuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 64)]
        bus_width: usize,
        #[arg(long, default_value_t = 64)]
        max_ops: usize,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path, overrides: Option<&Overrides>) -> anyhow::Result<World> {
    let mut world =
        load_scenario(&read(path)?).with_context(|| format!("loading {}", path.display()))?;
    if let Some(o) = overrides {
        if let Some(p) = o.policy {
            world.config.multi_match_policy = p;
        }
        world.config.dream_mode |= o.dream;
        world.config.pair_removal |= o.pair_removal;
        world.config.backtrack |= o.backtrack;
    }
    for note in &world.notes {
        eprintln!("note: {note}");
    }
    Ok(world)
}

fn assemble_file(path: &Path) -> anyhow::Result<NanoProgram> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "program".into());
    nanocode::assemble(&name, &read(path)?)
        .with_context(|| format!("assembling {}", path.display()))
}

fn default_width(program: &NanoProgram) -> usize {
    let top = program
        .ops
        .iter()
        .flat_map(|op| op.fm.iter().chain(&op.to))
        .max()
        .map_or(0, |b| b + 1);
    top.div_ceil(FIELD_WIDTH).max(1) * FIELD_WIDTH
}

fn step_interactively(mut world: World) -> anyhow::Result<()> {
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    writeln!(out, "tick={} stm={}", world.tick, world.stm.render())?;
    let mut lines = stdin.lock().lines();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        match lines.next().transpose()? {
            Some(line) if line.trim() != "q" => {}
            _ => break,
        }
        for ev in world.attention_cycle() {
            writeln!(out, "{ev}")?;
        }
        writeln!(out, "tick={} stm={}", world.tick, world.stm.render())?;
    }
    Ok(())
}

fn fuzz(seed: u64, cases: usize, bus_width: usize, max_ops: usize) -> anyhow::Result<()> {
    if bus_width < 2 {
        bail!("bus width must be at least 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let program = nanocode::random_program(&mut rng, bus_width, max_ops);
        let state = Bus::from_bits((0..bus_width).map(|_| rand::Rng::gen::<bool>(&mut rng)));
        let back = nanocode::run(
            &nanocode::run(&state, &program),
            &nanocode::reverse(&program),
        );
        if back != state {
            bail!("case {case}: reverse did not restore the bus\n{program}state {state}\ngot   {back}");
        }
    }
    println!("ok: {cases} programs restored (seed {seed}, bus width {bus_width})");
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            ticks,
            overrides,
        } => {
            let mut world = load(&scenario, Some(&overrides))?;
            let mut out = io::stdout().lock();
            let mut failed = None;
            world.run_streaming(ticks, |ev| {
                if failed.is_none() {
                    failed = writeln!(out, "{ev}").err();
                }
            });
            if let Some(e) = failed {
                return Err(e.into());
            }
        }
        Command::Step {
            scenario,
            overrides,
        } => step_interactively(load(&scenario, Some(&overrides))?)?,
        Command::Inspect { scenario } => print!("{}", load(&scenario, None)?.describe()),
        Command::NanoAssemble { file } => print!("{}", assemble_file(&file)?),
        Command::NanoVerify { file, bus_width } => {
            let program = assemble_file(&file)?;
            let width = bus_width.unwrap_or_else(|| default_width(&program));
            match nanocode::verify(&program, width) {
                Ok(()) => println!(
                    "ok: {} operations verified on a {width}-bit bus",
                    program.len()
                ),
                Err(violations) => {
                    for v in &violations {
                        println!("{v}");
                    }
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::NanoRun { file, bus } => {
            let program = assemble_file(&file)?;
            let bus: Bus = bus.parse().context("parsing --bus")?;
            nanocode::ensure_verified(&program, bus.width())?;
            println!("{}", nanocode::run(&bus, &program));
        }
        Command::NanoReverse { file } => print!("{}", nanocode::reverse(&assemble_file(&file)?)),
        Command::NanoFuzz {
            seed,
            cases,
            bus_width,
            max_ops,
        } => fuzz(seed, cases, bus_width, max_ops)?,
    }
    Ok(ExitCode::SUCCESS)
}

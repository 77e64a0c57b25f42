use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use zcap::capfile::{published, CapFile, ResultRecord};
use zcap::geometry::{enumerate_lines, factorize, is_collinear, lines_through, psi};
use zcap::ilp::{apply_cuts, build_model, write_lp_file, CutDescriptor};
use zcap::solvers::{is_complete, solve};
use zcap::{Cap, CapVariant, Point, Problem, SearchOptions, SolveResult, Status, Value, ZcapError};

/// `println!` that ignores a closed stdout instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "zcap", version, about = "Caps in the plane Z_n x Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether the given points lie on a common line.
    Collinear {
        n: u32,
        /// Points as u,v (at least three).
        #[arg(value_parser = parse_point, required = true)]
        points: Vec<Point>,
    },
    /// List the lines of the plane.
    Lines {
        n: u32,
        /// Print only the number of lines.
        #[arg(long, conflicts_with = "through")]
        count: bool,
        /// Only the lines through this point.
        #[arg(long, value_parser = parse_point)]
        through: Option<Point>,
    },
    /// Compute m2, n2 or sigma.
    Solve {
        problem: Problem,
        n: u32,
        /// Wall-clock limit in seconds; an unfinished search reports an interval.
        #[arg(long, default_value_t = 300.0)]
        time_limit: f64,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long, env = "ZCAP_THREADS")]
        threads: Option<usize>,
        /// Search without symmetry reduction.
        #[arg(long)]
        no_symmetry: bool,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
        /// Draw the certificate as a grid.
        #[arg(long)]
        grid: bool,
    },
    /// Check a cap file.
    Verify {
        file: PathBuf,
        /// Also require that no point can be added.
        #[arg(long)]
        complete: bool,
        /// Also require distinct rows and columns.
        #[arg(long)]
        permutation: bool,
    },
    /// Write the 0-1 program in LP format.
    Export {
        problem: Problem,
        n: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// Require this point in the cap.
        #[arg(long, value_parser = parse_point)]
        fix_in: Vec<Point>,
        /// Exclude this point from the cap.
        #[arg(long, value_parser = parse_point)]
        fix_out: Vec<Point>,
        /// Require at least this many points.
        #[arg(long)]
        min_card: Option<u32>,
    },
    /// Recompute the value tables and compare them with the published values.
    Tables {
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        /// Seconds allowed per entry.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, env = "ZCAP_THREADS")]
        threads: Option<usize>,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected u,v but found '{s}'"))?;
    let coord = |c: &str| c.trim().parse::<u32>().map_err(|_| format!("invalid coordinate '{c}' in '{s}'"));
    Ok(Point::new(coord(u)?, coord(v)?))
}

fn exit_for(err: &ZcapError) -> u8 {
    match err {
        ZcapError::Io { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn run(command: Command) -> zcap::Result<u8> {
    match command {
        Command::Collinear { n, points } => collinear(n, &points),
        Command::Lines { n, count, through } => lines(n, count, through),
        Command::Solve { problem, n, time_limit, threads, no_symmetry, json, grid } => {
            let mut opts = options(time_limit, threads)?;
            opts.use_symmetry = !no_symmetry;
            let result = solve(problem, n, &opts)?;
            if json {
                let record = ResultRecord::from(&result);
                out!("{}", serde_json::to_string(&record).expect("record serializes"));
            } else {
                print_result(&result, grid);
            }
            Ok(0)
        }
        Command::Verify { file, complete, permutation } => verify(&file, complete, permutation),
        Command::Export { problem, n, output, fix_in, fix_out, min_card } => {
            let model = build_model(problem, n)?;
            let cuts: Vec<CutDescriptor> = fix_in
                .into_iter()
                .map(CutDescriptor::FixOne)
                .chain(fix_out.into_iter().map(CutDescriptor::FixZero))
                .chain(min_card.and_then(|m| m.checked_sub(1)).map(CutDescriptor::CardinalityLowerBound))
                .collect();
            let model = apply_cuts(&model, &cuts)?;
            write_lp_file(&model, &output)?;
            out!(
                "wrote {}: {} variables, {} constraints",
                output.display(),
                model.num_variables(),
                model.num_constraints()
            );
            Ok(0)
        }
        Command::Tables { max_n, time_limit, threads } => tables(max_n, &options(time_limit, threads)?),
    }
}

fn options(time_limit: f64, threads: Option<usize>) -> zcap::Result<SearchOptions> {
    if !time_limit.is_finite() || time_limit <= 0.0 {
        return Err(ZcapError::ResourceLimit(format!("time limit must be positive, got {time_limit}")));
    }
    let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |t| t.get()));
    Ok(SearchOptions::default().with_threads(threads).with_time_limit(Duration::from_secs_f64(time_limit)))
}

fn collinear(n: u32, points: &[Point]) -> zcap::Result<u8> {
    if points.len() < 3 {
        eprintln!("error: collinear needs at least three points, got {}", points.len());
        return Ok(2);
    }
    for p in points {
        p.check(n)?;
    }
    let f = factorize(n as u64)?;
    if is_collinear(points, &f)? {
        out!("collinear");
        Ok(0)
    } else {
        out!("not collinear");
        Ok(1)
    }
}

fn lines(n: u32, count: bool, through: Option<Point>) -> zcap::Result<u8> {
    if count {
        out!("{}", psi(n as u64 * n as u64)?);
        return Ok(0);
    }
    let list = match through {
        Some(p) => lines_through(p.check(n)?, n)?,
        None => enumerate_lines(n)?,
    };
    for line in list {
        let pts: Vec<String> = line.points().iter().map(Point::to_string).collect();
        out!("{} + t{}: {}", line.anchor(), line.direction(), pts.join(" "));
    }
    Ok(0)
}

fn print_result(r: &SolveResult, grid: bool) {
    out!("{}({}) = {}", r.problem, r.n, r.value);
    out!("status: {}", r.status);
    out!("nodes: {}", r.nodes);
    out!("elapsed: {:.3}s", r.elapsed.as_secs_f64());
    if let Some(cap) = &r.certificate {
        let pts: Vec<String> = cap.points().iter().map(Point::to_string).collect();
        out!("cap ({} points): {}", cap.len(), pts.join(" "));
        if grid {
            out!("{}", render_grid(cap).trim_end());
        }
    }
}

/// Rows from `v = n - 1` down to `v = 0`, columns by increasing `u`.
fn render_grid(cap: &Cap) -> String {
    let n = cap.n();
    let mut out = String::new();
    for v in (0..n).rev() {
        let row: Vec<&str> = (0..n).map(|u| if cap.contains(Point::new(u, v)) { "●" } else { "." }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn verify(path: &std::path::Path, complete: bool, permutation: bool) -> zcap::Result<u8> {
    let file = CapFile::read(path)?;
    let variant = if permutation { CapVariant::Permutation } else { CapVariant::Plain };
    let cap = match Cap::new(file.n, file.points.iter().copied(), variant) {
        Ok(cap) => cap,
        Err(err @ (ZcapError::NotACap | ZcapError::NotPermutation)) => {
            out!("fail: {err}");
            return Ok(1);
        }
        Err(err) => return Err(err),
    };
    if complete && !is_complete(&cap) {
        out!("fail: the cap is not complete");
        return Ok(1);
    }
    out!("pass: {} points, n = {}", cap.len(), cap.n());
    Ok(0)
}

fn tables(max_n: u32, opts: &SearchOptions) -> zcap::Result<u8> {
    out!("{:>3}  {:>12}  {:>12}  {:>12}", "n", "m2", "n2", "sigma");
    let mut mismatches = 0;
    for n in 1..=max_n {
        let mut cells = Vec::new();
        for problem in [Problem::M2, Problem::N2, Problem::Sigma] {
            if n < 2 && problem != Problem::Sigma {
                cells.push("-".to_string());
                continue;
            }
            let r = solve(problem, n, opts)?;
            let mut cell = r.value.to_string();
            if r.status != Status::Optimal {
                cell.push('?');
            }
            if let Some(known) = published(problem, n) {
                if !consistent(r.value, known) {
                    cell.push_str(&format!(" !{known}"));
                    mismatches += 1;
                }
            }
            cells.push(cell);
        }
        out!("{n:>3}  {:>12}  {:>12}  {:>12}", cells[0], cells[1], cells[2]);
    }
    out!("'?' marks an unfinished search; '!v' marks disagreement with the published value v");
    if mismatches > 0 {
        out!("{mismatches} mismatch(es)");
    }
    Ok(0)
}

/// Two answers agree when their intervals overlap.
fn consistent(ours: Value, known: Value) -> bool {
    ours.lo() <= known.hi() && known.lo() <= ours.hi()
}

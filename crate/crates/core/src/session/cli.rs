//! Headless command line: solve a netlist or saved board and print CSV.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::breadboard::{connectivity, extract_netlist, BreadboardLayout};
use crate::circuit::Netlist;
use crate::netlist_io::{load_layout, parse_netlist_bytes, LayoutDocument};
use crate::solver::{solve_dc_with, solve_transient_with, SolveError, SolveOptions, SolveResult, TransientConfig};
use crate::viz::{field_at, wire_segments, GridConfig};

#[derive(Debug, Parser)]
#[command(name = "volta", version, about = "Breadboard circuit simulator")]
pub struct Cli {
    /// Text netlist to simulate.
    #[arg(long, value_name = "FILE", conflicts_with = "layout")]
    pub netlist: Option<PathBuf>,
    /// Saved breadboard layout to simulate.
    #[arg(long, value_name = "FILE")]
    pub layout: Option<PathBuf>,
    /// Print the DC operating point.
    #[arg(long, conflicts_with = "tran")]
    pub dc: bool,
    /// Print a transient run with step DT up to T_END (seconds).
    #[arg(long, num_args = 2, value_names = ["DT", "T_END"], allow_negative_numbers = true)]
    pub tran: Option<Vec<f64>>,
    /// Also report |B| in tesla at board point (X, Y) in metres, 5 mm above
    /// the board. Needs --layout.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    pub probe_field: Option<Vec<f64>>,
    /// Newton iteration limit per solve.
    #[arg(long, value_name = "N", default_value_t = crate::solver::MAX_NEWTON_ITERATIONS)]
    pub max_iterations: usize,
    /// Serve the session protocol on VOLTA_LISTEN (default 127.0.0.1:7171).
    #[arg(long, conflicts_with_all = ["dc", "tran", "netlist", "layout"])]
    pub serve: bool,
}

enum Input {
    Netlist(Netlist<f64>),
    Board(BreadboardLayout<f64>),
}

impl Input {
    fn netlist(&self) -> Netlist<f64> {
        match self {
            Input::Netlist(n) => n.clone(),
            Input::Board(layout) => extract_netlist(layout),
        }
    }
}

fn load(cli: &Cli) -> Result<Input, String> {
    let read = |path: &PathBuf| std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()));
    match (&cli.netlist, &cli.layout) {
        (Some(path), None) => {
            parse_netlist_bytes(&read(path)?).map(Input::Netlist).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(path)) => {
            let bytes = read(path)?;
            let text = String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            LayoutDocument::from_text(&text)
                .and_then(|doc| load_layout(&doc))
                .map(Input::Board)
                .map_err(|e| format!("{}: {e}", path.display()))
        }
        _ => Err("give exactly one of --netlist or --layout".into()),
    }
}

fn probe(input: &Input, point: Option<[f64; 2]>, result: &SolveResult<f64>) -> Option<f64> {
    let (Input::Board(layout), Some([x, y])) = (input, point) else {
        return None;
    };
    let segments = wire_segments(layout, result, &connectivity(layout));
    Some(field_at([x, y, GridConfig::<f64>::default().height], &segments).magnitude())
}

fn solve_error(stderr: &mut dyn Write, e: &SolveError<f64>) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    2
}

fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if cli.serve {
        return Ok(match super::serve(&super::listen_address()) {
            Ok(()) => 0,
            Err(e) => {
                writeln!(err, "error: {e}")?;
                1
            }
        });
    }
    if cli.probe_field.is_some() && cli.layout.is_none() {
        writeln!(err, "usage: --probe-field needs --layout")?;
        return Ok(1);
    }
    let tran = match cli.tran.as_deref() {
        Some(&[dt, t_end]) => match TransientConfig::new(dt, t_end) {
            Ok(config) => Some(config),
            Err(e) => {
                writeln!(err, "usage: --tran <dt> <t_end>: {e}")?;
                return Ok(1);
            }
        },
        _ => None,
    };
    if !cli.dc && tran.is_none() {
        writeln!(err, "usage: choose an analysis with --dc or --tran <dt> <t_end>")?;
        return Ok(1);
    }
    if cli.max_iterations == 0 {
        writeln!(err, "usage: --max-iterations must be at least 1")?;
        return Ok(1);
    }
    let input = match load(cli) {
        Ok(input) => input,
        Err(message) => {
            writeln!(err, "error: {message}")?;
            return Ok(1);
        }
    };
    let options = SolveOptions { max_iterations: cli.max_iterations, ..SolveOptions::default() };
    let point = cli.probe_field.as_deref().map(|p| [p[0], p[1]]);
    let netlist = input.netlist();

    match tran {
        None => {
            let result = match solve_dc_with(&netlist, &options) {
                Ok(r) => r,
                Err(e) => return Ok(solve_error(err, &e)),
            };
            writeln!(out, "name,value")?;
            for (node, v) in &result.node_voltages {
                writeln!(out, "{node},{v}")?;
            }
            for (id, i) in &result.branch_currents {
                writeln!(out, "I({id}),{i}")?;
            }
            if let Some(b) = probe(&input, point, &result) {
                writeln!(out, "B,{b}")?;
            }
            Ok(0)
        }
        Some(config) => {
            let nodes: Vec<_> = netlist.nodes().iter().collect();
            let mut header = vec!["time".to_string()];
            header.extend(nodes.iter().map(|n| n.to_string()));
            header.extend(netlist.branches().iter().map(|b| format!("I({})", b.id())));
            if point.is_some() {
                header.push("B".into());
            }
            writeln!(out, "{}", header.join(","))?;
            let (results, failure) = match solve_transient_with(&netlist, &config, &options) {
                Ok(results) => (results, None),
                Err(f) => (f.completed, Some(f.cause)),
            };
            for r in &results {
                let mut row = vec![r.time.to_string()];
                row.extend(nodes.iter().map(|n| r.node_voltages.get(*n).copied().unwrap_or(0.0).to_string()));
                row.extend(netlist.branches().iter().map(|b| r.branch_currents[b.id()].to_string()));
                if let Some(b) = probe(&input, point, r) {
                    row.push(b.to_string());
                }
                writeln!(out, "{}", row.join(","))?;
            }
            Ok(match failure {
                Some(e) => solve_error(err, &e),
                None => 0,
            })
        }
    }
}

/// Runs the command line with `args` (program name first) and returns the
/// process exit code: 0 on success, 1 for usage or input errors, 2 when the
/// circuit cannot be solved.
pub fn cli_run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                1
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    run(&cli, out, err).unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        1
    })
}

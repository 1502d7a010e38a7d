use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use pcm_core::io::{emit_log_header, emit_record, parse_matrix, parse_value};
use pcm_core::{Action, MonitorSession, PcMatrix, StepRecord, DEFAULT_THRESHOLD};

use crate::report::{evaluate, format_triad, render_text, render_triads};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "pcm", version, about = "Minimal CM inconsistency of pairwise comparison matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Acceptability threshold for CM*.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = parse_threshold)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal CM over all completions, verdict and maximal triads.
    Eval {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also print the minimally inconsistent completion.
        #[arg(long)]
        completion: bool,
    },
    /// Print the minimally inconsistent completion.
    Complete {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List the maximal triads with their values.
    Triads {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Read `i j value`, `retract i j` or `undo` lines and report after each.
    Monitor {
        /// Entry stream; standard input when omitted or `-`.
        path: Option<PathBuf>,
        /// Matrix order.
        #[arg(long, short = 'n')]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Idle seconds before a session expires.
        #[arg(long, env = "PCM_SESSION_TTL", default_value_t = 24 * 60 * 60)]
        session_ttl: u64,
    },
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v = parse_value(s).map_err(|e| e.to_string())?;
    if v < 1.0 {
        Ok(v)
    } else {
        Err(format!("threshold must lie strictly between 0 and 1, got {v}"))
    }
}

fn load(path: &PathBuf) -> anyhow::Result<PcMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Runs the CLI and returns the process exit code. `serve` is handled by
/// the binary, not here.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, input, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_DATA
        }
    }
}

fn execute(cmd: Command, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Eval { path, common, completion } => {
            let report = evaluate(&load(&path)?, common.threshold, completion)?;
            match common.format {
                Format::Text => write!(out, "{}", render_text(&report))?,
                Format::Machine => writeln!(out, "{}", serde_json::to_string(&report)?)?,
            }
        }
        Command::Complete { path, common } => {
            let report = evaluate(&load(&path)?, common.threshold, true)?;
            match common.format {
                Format::Text => {
                    let c = report.completion.as_ref().expect("requested");
                    writeln!(out, "# CM* = {:.6}", report.cm_star)?;
                    write!(out, "{}", c.text)?;
                }
                Format::Machine => writeln!(out, "{}", serde_json::to_string(&report.completion)?)?,
            }
        }
        Command::Triads { path, common } => {
            let report = evaluate(&load(&path)?, common.threshold, false)?;
            match common.format {
                Format::Text => write!(out, "{}", render_triads(&report))?,
                Format::Machine => writeln!(out, "{}", serde_json::to_string(&report.maximal_triads)?)?,
            }
        }
        Command::Monitor { path, order, common } => {
            let session = MonitorSession::new(order, common.threshold)?;
            match path {
                Some(p) if p.as_os_str() != "-" => {
                    let file = std::fs::File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    monitor(session, &mut std::io::BufReader::new(file), common.format, out, err)?;
                }
                _ => monitor(session, input, common.format, out, err)?,
            }
        }
        Command::Serve { .. } => anyhow::bail!("serve is only available from the pcm binary"),
    }
    Ok(EXIT_OK)
}

/// Parses one monitor command line. `Ok(None)` for blanks and comments.
pub fn parse_command(line: &str) -> Result<Option<Action>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let words: Vec<&str> = line.split_whitespace().collect();
    let index = |s: &str| s.parse::<usize>().map_err(|_| format!("bad index {s:?}"));
    match words.as_slice() {
        ["undo"] => Ok(Some(Action::Undo)),
        ["retract", i, j] => Ok(Some(Action::Retract { i: index(i)?, j: index(j)? })),
        [i, j, v] => Ok(Some(Action::Insert {
            i: index(i)?,
            j: index(j)?,
            value: parse_value(v).map_err(|e| e.to_string())?,
        })),
        _ => Err(format!("expected `i j value`, `retract i j` or `undo`, got {line:?}")),
    }
}

fn describe(a: &Action) -> String {
    match a {
        Action::Insert { i, j, value } => format!("insert ({i},{j}) = {value}"),
        Action::Retract { i, j } => format!("retract ({i},{j})"),
        Action::Undo => "undo".into(),
    }
}

fn write_step(out: &mut dyn Write, r: &StepRecord, threshold: f64) -> std::io::Result<()> {
    writeln!(
        out,
        "step {:>2}  {:<24} CM* = {:.4}{}",
        r.step,
        describe(&r.action),
        r.cm_star,
        if r.alarmed { "  ALARM" } else { "" }
    )?;
    if r.alarmed {
        writeln!(out, "  CM* exceeds threshold {threshold:.4}; please verify the entries below")?;
        let triads: Vec<String> = r.maximal_triads.iter().map(|&t| format_triad(t)).collect();
        writeln!(out, "  maximal triads: {}", triads.join(" "))?;
        if !r.suspect_pairs.is_empty() {
            let pairs: Vec<String> = r.suspect_pairs.iter().map(|(i, j)| format!("({i},{j})")).collect();
            writeln!(out, "  suspect entries: {}", pairs.join(" "))?;
        }
    }
    Ok(())
}

fn monitor(
    mut session: MonitorSession,
    input: &mut dyn BufRead,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<()> {
    let mut header_written = false;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let action = match parse_command(&line) {
            Ok(Some(a)) => a,
            Ok(None) => continue,
            Err(e) => {
                writeln!(err, "warning: line {}: {e}", idx + 1)?;
                continue;
            }
        };
        let threshold = session.threshold();
        match session.apply(&action) {
            Ok(record) => match format {
                Format::Text => write_step(out, record, threshold)?,
                Format::Machine => {
                    if !header_written {
                        writeln!(out, "{}", emit_log_header(&session))?;
                        header_written = true;
                    }
                    writeln!(out, "{}", emit_record(session.last().expect("just applied")))?;
                }
            },
            Err(e) => writeln!(err, "warning: line {}: {e}", idx + 1)?,
        }
        out.flush()?;
    }
    Ok(())
}

pub fn idle_expiry(secs: u64) -> Duration {
    Duration::from_secs(secs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_lines() {
        assert_eq!(parse_command("  # note"), Ok(None));
        assert_eq!(parse_command("undo"), Ok(Some(Action::Undo)));
        assert_eq!(parse_command("retract 4 5"), Ok(Some(Action::Retract { i: 4, j: 5 })));
        assert_eq!(
            parse_command("4 5 1/4"),
            Ok(Some(Action::Insert { i: 4, j: 5, value: 0.25 }))
        );
        assert!(parse_command("4 5").is_err());
        assert!(parse_command("a 5 2").is_err());
        assert!(parse_command("1 2 -3").is_err());
    }

    #[test]
    fn threshold_flag() {
        assert_eq!(parse_threshold("1/4"), Ok(0.25));
        assert!(parse_threshold("1").is_err());
        assert!(parse_threshold("0").is_err());
    }
}

//! Line-oriented text format for constraint systems.
//!
//! ```text
//! # hard squares in two dimensions
//! k 2
//! d 2
//! axis 1
//! 1 2
//! 2 1
//! 2 2
//! axis 2
//! 1 2
//! 2 1
//! 2 2
//! ```
//!
//! Colours are 1-based. `#` starts a comment. The writer emits axes in order and
//! edges sorted, so `format_system(&parse_system(&format_system(s))?)` is the
//! identity on writer output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::graph::ConstraintGraph;
use super::system::ConstraintSystem;
use crate::error::{Error, Result};

fn parse_int(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer, found `{tok}`"),
    })
}

pub fn parse_system(text: &str) -> Result<ConstraintSystem> {
    let mut k: Option<usize> = None;
    let mut d: Option<usize> = None;
    let mut axes: Vec<Option<ConstraintGraph>> = Vec::new();
    let mut current: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            ["k", v] => {
                let v = parse_int(v, line)?;
                match k {
                    Some(prev) if prev != v => {
                        return Err(Error::InconsistentColours {
                            axis: current.map_or(0, |a| a + 1),
                            expected: prev,
                            found: v,
                        })
                    }
                    Some(_) => {}
                    None => {
                        ConstraintGraph::empty(v).map_err(|e| Error::Parse { line, message: e.to_string() })?;
                        k = Some(v);
                    }
                }
            }
            ["d", v] => {
                if d.is_some() {
                    return Err(Error::Parse { line, message: "dimension declared twice".into() });
                }
                let v = parse_int(v, line)?;
                if v == 0 {
                    return Err(Error::Parse { line, message: "dimension must be at least 1".into() });
                }
                d = Some(v);
                axes = vec![None; v];
            }
            ["axis", v] => {
                let (Some(kk), Some(dd)) = (k, d) else {
                    return Err(Error::Parse {
                        line,
                        message: "`k` and `d` must be declared before the first axis".into(),
                    });
                };
                let a = parse_int(v, line)?;
                if a == 0 || a > dd {
                    return Err(Error::Parse { line, message: format!("axis {a} outside 1..={dd}") });
                }
                if axes[a - 1].is_some() {
                    return Err(Error::Parse { line, message: format!("axis {a} declared twice") });
                }
                axes[a - 1] = Some(ConstraintGraph::empty(kk)?);
                current = Some(a - 1);
            }
            [from, to] => {
                let Some(a) = current else {
                    return Err(Error::Parse { line, message: "edge outside an `axis` section".into() });
                };
                let kk = k.expect("axis sections require k");
                let (from, to) = (parse_int(from, line)?, parse_int(to, line)?);
                for c in [from, to] {
                    if c == 0 || c > kk {
                        return Err(Error::ColourOutOfRange { line, colour: c, k: kk });
                    }
                }
                axes[a].as_mut().expect("current axis exists").add_edge(from - 1, to - 1);
            }
            _ => {
                return Err(Error::Parse { line, message: format!("unrecognised line `{content}`") });
            }
        }
    }

    let last = text.lines().count().max(1);
    if k.is_none() || d.is_none() {
        return Err(Error::Parse { line: last, message: "missing `k` or `d` declaration".into() });
    }
    let graphs = axes
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            g.ok_or_else(|| Error::Parse { line: last, message: format!("axis {} missing", i + 1) })
        })
        .collect::<Result<Vec<_>>>()?;
    ConstraintSystem::new(graphs)
}

pub fn format_system(sys: &ConstraintSystem) -> String {
    let mut out = String::new();
    writeln!(out, "k {}", sys.k()).unwrap();
    writeln!(out, "d {}", sys.d()).unwrap();
    for (i, g) in sys.axes().iter().enumerate() {
        writeln!(out, "axis {}", i + 1).unwrap();
        for (a, b) in g.edges() {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
    }
    out
}

pub fn load_system(path: impl AsRef<Path>) -> Result<ConstraintSystem> {
    parse_system(&fs::read_to_string(path)?)
}

pub fn save_system(sys: &ConstraintSystem, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_system(sys))?;
    Ok(())
}

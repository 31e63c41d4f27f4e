//! Plain-text parameter files.
//!
//! ```text
//! hybrid-forecast-params v1
//! kind atgru
//! input_dim 60
//! hidden 64
//! seed 42
//! count 25089
//! <one weight per line, row-major, shortest round-trip decimal>
//! ```
//!
//! Rust's float formatting round-trips exactly, so load(save(p)) is
//! bit-identical to `p`.

use std::fmt::Write as _;

use super::model::{ModelKind, ModelSpec, NetworkParams};
use crate::error::{Error, Result};

pub const MAGIC: &str = "hybrid-forecast-params";
pub const VERSION: u32 = 1;

pub fn to_text(params: &NetworkParams) -> String {
    let weights = params.network.flatten();
    let spec = &params.spec;
    let hidden: Vec<String> = spec.hidden.iter().map(|h| h.to_string()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} v{VERSION}");
    let _ = writeln!(out, "kind {}", spec.kind.as_str());
    let _ = writeln!(out, "input_dim {}", spec.input_dim);
    let _ = writeln!(out, "hidden {}", hidden.join(","));
    let _ = writeln!(out, "seed {}", spec.seed);
    let _ = writeln!(out, "count {}", weights.len());
    for w in weights {
        let _ = writeln!(out, "{w:?}");
    }
    out
}

fn field<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<&'a str> {
    let (row, line) = lines.next().ok_or(Error::Parse {
        row: 0,
        message: format!("missing `{key}` line"),
    })?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Parse {
            row,
            message: format!("expected `{key} ...`, found `{line}`"),
        })
}

fn parse_num<T: std::str::FromStr>(row: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("`{s}` is not a valid number"),
    })
}

pub fn from_text(text: &str) -> Result<NetworkParams> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = lines.next().map(|(_, l)| l).unwrap_or_default();
    if header != format!("{MAGIC} v{VERSION}") {
        return Err(Error::Parse {
            row: 1,
            message: format!("unsupported parameter file header `{header}`"),
        });
    }
    let kind_str = field(&mut lines, "kind")?;
    let kind = ModelKind::parse(kind_str).ok_or_else(|| Error::Parse {
        row: 2,
        message: format!("unknown model kind `{kind_str}`"),
    })?;
    let input_dim = parse_num(3, field(&mut lines, "input_dim")?)?;
    let hidden = field(&mut lines, "hidden")?
        .split(',')
        .map(|h| parse_num(4, h))
        .collect::<Result<Vec<usize>>>()?;
    let seed = parse_num(5, field(&mut lines, "seed")?)?;
    let count: usize = parse_num(6, field(&mut lines, "count")?)?;
    let weights = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(row, l)| parse_num::<f64>(row, l))
        .collect::<Result<Vec<f64>>>()?;
    if weights.len() != count {
        return Err(Error::Parse {
            row: 6,
            message: format!(
                "header announces {count} weights, payload has {}",
                weights.len()
            ),
        });
    }
    let mut params = NetworkParams::init(ModelSpec::new(kind, input_dim, hidden, seed))?;
    params.network.load_flat(&weights)?;
    Ok(params)
}

pub fn save(params: &NetworkParams, path: impl AsRef<std::path::Path>) -> Result<()> {
    crate::output::write_atomic(path.as_ref(), to_text(params).as_bytes())
}

pub fn load(path: impl AsRef<std::path::Path>) -> Result<NetworkParams> {
    from_text(&std::fs::read_to_string(path)?)
}

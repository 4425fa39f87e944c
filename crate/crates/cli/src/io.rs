use std::io::Read;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use supersmooth::error::{Error, Result};
use supersmooth::json::{parse_text, point_from_value, supernumber_from_value, to_pretty};
use supersmooth::scalar::Scalar;
use supersmooth::superspace::SuperPoint;
use supersmooth::supernumber::{Skeleton, Supernumber};

use crate::RunConfig;

pub fn read_value(path: &Path) -> Result<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Config(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?
    };
    parse_text(&text, &path.display().to_string())
}

pub fn read_supernumber<S: Scalar>(path: &Path, default: Option<Skeleton>) -> Result<Supernumber<S>> {
    supernumber_from_value(&read_value(path)?, default)
}

pub fn read_point<S: Scalar>(path: &Path) -> Result<SuperPoint<S>> {
    point_from_value(&read_value(path)?)
}

/// A single point object or an array of them.
pub fn read_points<S: Scalar>(path: &Path) -> Result<Vec<SuperPoint<S>>> {
    match read_value(path)? {
        Value::Array(items) => items.iter().map(point_from_value).collect(),
        v => Ok(vec![point_from_value(&v)?]),
    }
}

/// Even arguments given as a point object or as an array of supernumbers.
pub fn read_even_args<S: Scalar>(path: &Path, default: Option<Skeleton>) -> Result<(Vec<Supernumber<S>>, Skeleton)> {
    match read_value(path)? {
        Value::Array(items) => {
            let args = items.iter().map(|v| supernumber_from_value::<S>(v, default)).collect::<Result<Vec<_>>>()?;
            let sk = args
                .iter()
                .map(Supernumber::skeleton)
                .reduce(Skeleton::join)
                .or(default)
                .ok_or_else(|| Error::Config("no arguments and no --skeleton".into()))?;
            let args = args.iter().map(|a| a.embed(sk)).collect::<Result<Vec<_>>>()?;
            Ok((args, sk))
        }
        v => {
            let p: SuperPoint<S> = point_from_value(&v)?;
            Ok((p.even().to_vec(), p.skeleton()))
        }
    }
}

/// Prints `text` and writes `report` to `--out` when requested.
pub fn emit<T: Serialize>(cfg: &RunConfig, text: &str, report: &T) -> Result<()> {
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    if let Some(path) = &cfg.out {
        let mut body = to_pretty(report);
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Prints the canonical JSON of `report` and mirrors it to `--out`.
pub fn emit_json<T: Serialize>(cfg: &RunConfig, report: &T) -> Result<()> {
    emit(cfg, &to_pretty(report), report)
}

//! Deterministic CSV/JSON emission. Every float uses 17 significant digits
//! so the output round-trips bit-exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use crate::CliError;

/// 17-significant-digit float, round-trip safe.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional float column; empty when absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&str>) -> Result<Sink, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::Config(format!("cannot create {p}: {e}"))
            })?)),
            None => Box::new(io::stdout()),
        };
        Ok(Sink { inner })
    }

    pub fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.inner, "{s}").map_err(|e| CliError::Run(format!("write failed: {e}")))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner
            .flush()
            .map_err(|e| CliError::Run(format!("flush failed: {e}")))
    }
}

pub fn write_csv(path: Option<&str>, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut sink = Sink::open(path)?;
    sink.line(header)?;
    for row in rows {
        sink.line(row)?;
    }
    sink.finish()
}

//! CSV writing: comma-separated, `\n` line endings, header row, floats at 17
//! significant digits. Bytes are identical across runs and thread counts.

use crate::CliError;
use padic_qmc::fmt::sig17;
use std::io::Write;
use std::path::{Path, PathBuf};

pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_path(path: Option<&Path>) -> Sink {
        match path {
            Some(p) => Sink::File(p.to_path_buf()),
            None => Sink::Stdout,
        }
    }

    pub fn write_all(&self, bytes: &[u8]) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                std::io::stdout().write_all(bytes)?;
                Ok(())
            }
            Sink::File(path) => {
                std::fs::write(path, bytes).map_err(|e| {
                    CliError::Io(format!("cannot write {}: {e}", path.display()))
                })
            }
        }
    }
}

/// Assembles CSV text: one header, then rows.
pub struct Csv {
    buffer: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = header.join(",");
        buffer.push('\n');
        Csv { buffer }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.buffer.push(',');
            }
            first = false;
            match cell {
                Cell::Str(s) => self.buffer.push_str(s),
                Cell::Int(v) => self.buffer.push_str(&v.to_string()),
                Cell::Float(x) => self.buffer.push_str(&sig17(*x)),
                Cell::Empty => {}
            }
        }
        self.buffer.push('\n');
    }

    /// A raw non-tabular trailer line (e.g. the slope summary).
    pub fn line(&mut self, text: &str) {
        self.buffer.push_str(text);
        self.buffer.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buffer.into_bytes()
    }
}

pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    pub fn opt_int(v: Option<u64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Int)
    }
}

//! Disk-backed spill area for large intermediate states.
//!
//! The directory comes from `VOAFORGE_SCRATCH`; without it nothing is spilled.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::fock::{FockMonomial, FockState, Mode};
use crate::scalar::Scalar;

pub const SCRATCH_ENV: &str = "VOAFORGE_SCRATCH";

/// States with more terms than this are spilled when a scratch directory is set.
pub const DEFAULT_THRESHOLD: usize = 200_000;

static COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct Scratch {
    dir: Option<PathBuf>,
    threshold: usize,
}

/// A state that is either held in memory or parked in a file.
pub enum Held<S> {
    Memory(FockState<S>),
    Disk { path: PathBuf, rank: usize },
}

impl Default for Scratch {
    fn default() -> Self {
        Self::from_env()
    }
}

impl Scratch {
    pub fn from_env() -> Self {
        Scratch { dir: std::env::var_os(SCRATCH_ENV).map(PathBuf::from), threshold: DEFAULT_THRESHOLD }
    }

    pub fn disabled() -> Self {
        Scratch { dir: None, threshold: usize::MAX }
    }

    pub fn with_dir(dir: impl Into<PathBuf>, threshold: usize) -> Self {
        Scratch { dir: Some(dir.into()), threshold }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Park `state` on disk if it is large and a directory is configured.
    pub fn hold<S: Scalar>(&self, state: FockState<S>) -> Result<Held<S>> {
        match &self.dir {
            Some(dir) if state.len() > self.threshold => {
                std::fs::create_dir_all(dir).map_err(|e| Error::Scratch(format!("{}: {e}", dir.display())))?;
                let id = COUNTER.fetch_add(1, Ordering::Relaxed);
                let path = dir.join(format!("state-{}-{id}.txt", std::process::id()));
                write_state(&path, &state)?;
                Ok(Held::Disk { path, rank: state.rank() })
            }
            _ => Ok(Held::Memory(state)),
        }
    }
}

impl<S: Scalar> Held<S> {
    pub fn into_state(self) -> Result<FockState<S>> {
        match self {
            Held::Memory(s) => Ok(s),
            Held::Disk { path, rank } => {
                let s = read_state(&path, rank);
                let _ = std::fs::remove_file(&path);
                s
            }
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Scratch(format!("{}: {e}", path.display()))
}

/// One term per line: the coefficient, then `gen:depth` pairs.
pub fn write_state<S: Scalar>(path: &Path, state: &FockState<S>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for (m, c) in state.sorted_terms() {
        write!(w, "{c}").map_err(|e| io_err(path, e))?;
        for mode in m.modes() {
            write!(w, " {}:{}", mode.gen, mode.depth).map_err(|e| io_err(path, e))?;
        }
        writeln!(w).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_state<S: Scalar>(path: &Path, rank: usize) -> Result<FockState<S>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = FockState::zero(rank);
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        let mut parts = line.split_whitespace();
        let Some(c) = parts.next() else { continue };
        let c: S = c.parse().map_err(|_| io_err(path, "malformed coefficient"))?;
        let mut modes = Vec::new();
        for p in parts {
            let (g, d) = p.split_once(':').ok_or_else(|| io_err(path, "malformed mode"))?;
            let g: usize = g.parse().map_err(|e| io_err(path, e))?;
            let d: usize = d.parse().map_err(|e| io_err(path, e))?;
            modes.push(Mode::new(g, d));
        }
        out.add_term(FockMonomial::from_modes(modes), c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::omega;
    use crate::Q;

    #[test]
    fn spill_round_trip() {
        let dir = std::env::temp_dir().join(format!("voaforge-scratch-test-{}", std::process::id()));
        let scratch = Scratch::with_dir(&dir, 0);
        let s = omega::<Q>(1, 2, 2).circle(&omega(0, 3, 2), -1).unwrap().scale(&Q::new((-3).into(), 7.into()));
        let held = scratch.hold(s.clone()).unwrap();
        assert!(matches!(held, Held::Disk { .. }));
        assert_eq!(held.into_state().unwrap(), s);
        let _ = std::fs::remove_dir_all(&dir);
        assert!(matches!(Scratch::disabled().hold(s).unwrap(), Held::Memory(_)));
    }
}

//! State and panel files.
//!
//! Text layout, one header line then numeric rows:
//!
//! ```text
//! QSTATE v1 n=3
//! label optional free text
//! 7.0710678118654757e-1 0e0
//! ...
//! ```
//!
//! ```text
//! QPANEL v1 n=3
//! entry 1
//! <row 0: re im re im ...>
//! ...
//! entry 2
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. Files ending in
//! `.json` carry the same fields as JSON.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rdmpanel::{DensityMatrix, Ket, RdmPanel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Norm deviation beyond which a loaded state is rejected.
pub const NORM_REJECT: f64 = 1e-6;
/// Norm deviation beyond which a loaded state is renormalized with a warning.
pub const NORM_WARN: f64 = 1e-9;
pub const HERMITIAN_LOAD_TOL: f64 = 1e-6;

const STATE_MAGIC: &str = "QSTATE";
const PANEL_MAGIC: &str = "QPANEL";
const VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEntry {
    /// The qubit traced out to form this entry.
    pub omitted: usize,
    /// Row-major `(re, im)` pairs.
    pub rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelFile {
    pub n: usize,
    pub entries: Vec<PanelEntry>,
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(line: Option<(usize, &str)>, magic: &str) -> Result<usize> {
    let (no, text) = line.ok_or_else(|| parse_err(1, "empty file"))?;
    let mut parts = text.split_whitespace();
    if parts.next() != Some(magic) {
        return Err(parse_err(no, format!("expected header `{magic} {VERSION} n=<n>`")));
    }
    match parts.next() {
        Some(VERSION) => {}
        other => return Err(parse_err(no, format!("unsupported version {other:?}"))),
    }
    let n = parts
        .next()
        .and_then(|p| p.strip_prefix("n="))
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| parse_err(no, "missing or malformed n=<n>"))?;
    if n == 0 || n > rdmpanel::ket::MAX_QUBITS {
        return Err(parse_err(no, format!("n={n} out of range")));
    }
    Ok(n)
}

fn parse_floats(no: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(no, format!("`{t}` is not a number"))))
        .collect::<Result<_>>()?;
    if vals.len() != expected {
        return Err(parse_err(no, format!("expected {expected} numbers, found {}", vals.len())));
    }
    if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
        return Err(parse_err(no, format!("non-finite value {bad}")));
    }
    Ok(vals)
}

impl StateFile {
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text).peekable();
        let n = parse_header(lines.next(), STATE_MAGIC)?;
        let mut label = None;
        if let Some((_, l)) = lines.peek() {
            if let Some(rest) = l.strip_prefix("label") {
                label = Some(rest.trim().to_string());
                lines.next();
            }
        }
        let dim = 1usize << n;
        let mut amplitudes = Vec::with_capacity(dim);
        let mut last = 1;
        for (no, l) in lines {
            last = no;
            if amplitudes.len() == dim {
                return Err(parse_err(no, format!("more than {dim} amplitude rows")));
            }
            let v = parse_floats(no, l, 2)?;
            amplitudes.push([v[0], v[1]]);
        }
        if amplitudes.len() != dim {
            return Err(parse_err(
                last,
                format!("expected {dim} amplitude rows, file ends after {}", amplitudes.len()),
            ));
        }
        Ok(Self { n, label, amplitudes })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{STATE_MAGIC} {VERSION} n={}\n", self.n);
        if let Some(l) = &self.label {
            out.push_str(&format!("label {l}\n"));
        }
        for [re, im] in &self.amplitudes {
            out.push_str(&format!("{re:e} {im:e}\n"));
        }
        out
    }

    pub fn from_ket(psi: &Ket, label: Option<String>) -> Self {
        Self {
            n: psi.n(),
            label,
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Builds the ket, renormalizing (with a warning) above [`NORM_WARN`].
    pub fn to_ket(&self) -> Result<(Ket, Option<String>)> {
        if self.amplitudes.len() != 1 << self.n {
            return Err(FormatError::Invalid(format!(
                "n={} needs {} amplitudes, got {}",
                self.n,
                1usize << self.n,
                self.amplitudes.len()
            )));
        }
        let amps: Vec<C64> = self.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dev = (norm - 1.0).abs();
        if dev > NORM_REJECT {
            return Err(FormatError::Invalid(format!("state norm {norm} deviates from 1 by {dev:e}")));
        }
        let warning = (dev > NORM_WARN).then(|| format!("warning: state norm {norm} renormalized"));
        let ket = Ket::new(self.n, amps).map_err(|e| FormatError::Invalid(e.to_string()))?;
        Ok((ket, warning))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        if is_json(path) {
            Ok(serde_json::from_str(&text)?)
        } else {
            Self::parse_text(&text)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = if is_json(path) {
            serde_json::to_string_pretty(self)? + "\n"
        } else {
            self.to_text()
        };
        write(path, &text)
    }
}

impl PanelFile {
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let n = parse_header(lines.next(), PANEL_MAGIC)?;
        if n < 2 {
            return Err(parse_err(1, "a panel needs n ≥ 2"));
        }
        let side = 1usize << (n - 1);
        let mut entries: Vec<PanelEntry> = Vec::with_capacity(n);
        let mut last = 1;
        for (no, l) in lines {
            last = no;
            if let Some(rest) = l.strip_prefix("entry") {
                if let Some(prev) = entries.last() {
                    if prev.rows.len() != side {
                        return Err(parse_err(no, format!("entry {} has {} rows, expected {side}", prev.omitted, prev.rows.len())));
                    }
                }
                let omitted = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(no, "malformed entry label"))?;
                entries.push(PanelEntry { omitted, rows: Vec::new() });
                continue;
            }
            let Some(entry) = entries.last_mut() else {
                return Err(parse_err(no, "matrix row before any `entry` line"));
            };
            if entry.rows.len() == side {
                return Err(parse_err(no, format!("entry {} has more than {side} rows", entry.omitted)));
            }
            let v = parse_floats(no, l, 2 * side)?;
            entry.rows.push(v.chunks(2).map(|c| [c[0], c[1]]).collect());
        }
        match entries.last() {
            Some(e) if e.rows.len() != side => {
                return Err(parse_err(last, format!("entry {} has {} rows, expected {side}", e.omitted, e.rows.len())))
            }
            _ => {}
        }
        if entries.len() != n {
            return Err(parse_err(last, format!("expected {n} entries, found {}", entries.len())));
        }
        Ok(Self { n, entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{PANEL_MAGIC} {VERSION} n={}\n", self.n);
        for e in &self.entries {
            out.push_str(&format!("entry {}\n", e.omitted));
            for row in &e.rows {
                let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:e} {im:e}")).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn from_panel(panel: &RdmPanel) -> Self {
        let entries = (1..=panel.n())
            .map(|j| {
                let m = panel.entry(j).matrix();
                PanelEntry {
                    omitted: j,
                    rows: (0..m.nrows())
                        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                        .collect(),
                }
            })
            .collect();
        Self { n: panel.n(), entries }
    }

    pub fn to_panel(&self) -> Result<RdmPanel> {
        let n = self.n;
        let side = 1usize << (n.max(1) - 1);
        let mut slots: Vec<Option<DensityMatrix>> = vec![None; n];
        for e in &self.entries {
            let j = e.omitted;
            if j == 0 || j > n {
                return Err(FormatError::Invalid(format!("entry label {j} out of range 1..={n}")));
            }
            if slots[j - 1].is_some() {
                return Err(FormatError::Invalid(format!("entry {j} appears twice")));
            }
            if e.rows.len() != side || e.rows.iter().any(|r| r.len() != side) {
                return Err(FormatError::Invalid(format!("entry {j} is not {side}×{side}")));
            }
            let m = DMatrix::from_fn(side, side, |r, c| C64::new(e.rows[r][c][0], e.rows[r][c][1]));
            let labels = (1..=n).filter(|&k| k != j).collect();
            let rho = DensityMatrix::with_hermitian_tol(labels, m, HERMITIAN_LOAD_TOL)
                .map_err(|err| FormatError::Invalid(format!("entry {j}: {err}")))?;
            slots[j - 1] = Some(rho);
        }
        let entries: Vec<DensityMatrix> = slots
            .into_iter()
            .enumerate()
            .map(|(k, s)| s.ok_or_else(|| FormatError::Invalid(format!("entry {} missing", k + 1))))
            .collect::<Result<_>>()?;
        RdmPanel::new(entries).map_err(|e| FormatError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        if is_json(path) {
            Ok(serde_json::from_str(&text)?)
        } else {
            Self::parse_text(&text)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = if is_json(path) {
            serde_json::to_string_pretty(self)? + "\n"
        } else {
            self.to_text()
        };
        write(path, &text)
    }
}
